#pragma once

#include "ncmixed/common.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace ncmixed {

/// Triangular face keyed by its sorted global vertex indices.
struct Face {
  std::array<int, 3> v;
  /// normalize((p1 - p0) x (p2 - p0)) for the sorted vertices.
  Vec3 normal;
  double area = 0.0;
  /// tets[0] is the tet the normal points out of; tets[1] is -1 on the boundary
  /// (in which case the normal may point inward, see TetMesh::face_sign).
  std::array<int, 2> tets{-1, -1};
  bool boundary = false;
};

/// Edge keyed by its sorted global vertex indices; tangent points from v[0] to v[1].
struct Edge {
  std::array<int, 2> v;
  Vec3 tangent;
};

/// Local edge numbering inside a tet: pairs of local vertex indices.
inline constexpr std::array<std::array<int, 2>, 6> kTetEdges = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Conforming tetrahedral mesh with derived face/edge connectivity.
///
/// Immutable after construction. Tets are reoriented to positive signed
/// volume; local face i is the face opposite local vertex i.
class TetMesh {
 public:
  TetMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 4>>& tets() const { return tets_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Edge>& edges() const { return edges_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_tets() const { return static_cast<int>(tets_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_boundary_faces() const;

  /// Global face index of local face i (opposite local vertex i) of tet t.
  int tet_face(int t, int i) const { return tet_faces_[t][i]; }
  /// +1 when the stored face normal is outward for tet t, -1 otherwise.
  int face_sign(int t, int i) const { return tet_face_signs_[t][i]; }
  /// Global edge index of local edge kTetEdges[e] of tet t.
  int tet_edge(int t, int e) const { return tet_edges_[t][e]; }

  std::array<Vec3, 4> tet_points(int t) const;
  std::array<Vec3, 3> face_points(int f) const;
  double tet_volume(int t) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> tets_;
  std::vector<Face> faces_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 4>> tet_faces_;
  std::vector<std::array<int, 4>> tet_face_signs_;
  std::vector<std::array<int, 6>> tet_edges_;
};

struct MeshQuality {
  double h_max = 0.0;
  /// max over tets of diameter / inscribed-ball diameter
  double shape_ratio = 0.0;
};

double signed_volume(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3);
double tet_diameter(const std::array<Vec3, 4>& p);
double inscribed_diameter(const std::array<Vec3, 4>& p);

/// Kuhn (6-tet) subdivision of an n x n x n grid of the box [0,extent].
TetMesh build_box_mesh(int n, const Vec3& extent = Vec3::Ones());

MeshQuality mesh_quality(const TetMesh& mesh);

/// Plain-text dump, one record per line: `v x y z` and `t i0 i1 i2 i3`.
void write_mesh(std::ostream& os, const TetMesh& mesh);
TetMesh read_mesh(std::istream& is);

}  // namespace ncmixed
