#include "ncmixed/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace ncmixed {

Variant parse_variant(const std::string& s)
{
  if (s == "full") return Variant::full;
  if (s == "reduced") return Variant::reduced;
  throw InvalidArgument("unknown variant '" + s + "' (expected full or reduced)");
}

double signed_volume(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3)
{
  return (p1 - p0).dot((p2 - p0).cross(p3 - p0)) / 6.0;
}

double tet_diameter(const std::array<Vec3, 4>& p)
{
  double d = 0.0;
  for (const auto& [a, b] : kTetEdges)
    d = std::max(d, (p[a] - p[b]).norm());
  return d;
}

double inscribed_diameter(const std::array<Vec3, 4>& p)
{
  const double vol = std::abs(signed_volume(p[0], p[1], p[2], p[3]));
  double surface = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Vec3& a = p[(i + 1) % 4];
    const Vec3& b = p[(i + 2) % 4];
    const Vec3& c = p[(i + 3) % 4];
    surface += 0.5 * (b - a).cross(c - a).norm();
  }
  return 6.0 * vol / surface;
}

TetMesh::TetMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets)
    : vertices_(std::move(vertices)), tets_(std::move(tets))
{
  const int nv = num_vertices();
  for (auto& t : tets_) {
    for (int v : t)
      if (v < 0 || v >= nv) throw InvalidArgument("tet references a missing vertex");
    const auto& p = vertices_;
    const double vol = signed_volume(p[t[0]], p[t[1]], p[t[2]], p[t[3]]);
    const double scale = std::pow(tet_diameter({p[t[0]], p[t[1]], p[t[2]], p[t[3]]}), 3);
    if (!(std::abs(vol) > 1e-12 * scale))
      throw DegenerateGeometry("tet has (near) zero volume");
    if (vol < 0) std::swap(t[2], t[3]);
  }

  // Faces and edges are numbered in lexicographic order of their sorted keys.
  std::map<std::array<int, 3>, int> face_ids;
  std::map<std::array<int, 2>, int> edge_ids;
  for (const auto& t : tets_) {
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> key{t[(i + 1) % 4], t[(i + 2) % 4], t[(i + 3) % 4]};
      std::sort(key.begin(), key.end());
      face_ids.emplace(key, 0);
    }
    for (const auto& [a, b] : kTetEdges)
      edge_ids.emplace(std::array<int, 2>{std::min(t[a], t[b]), std::max(t[a], t[b])}, 0);
  }

  faces_.reserve(face_ids.size());
  for (auto& [key, id] : face_ids) {
    id = static_cast<int>(faces_.size());
    Face f;
    f.v = key;
    const Vec3 c = (vertices_[key[1]] - vertices_[key[0]]).cross(vertices_[key[2]] - vertices_[key[0]]);
    f.area = 0.5 * c.norm();
    f.normal = c.normalized();
    faces_.push_back(f);
  }
  edges_.reserve(edge_ids.size());
  for (auto& [key, id] : edge_ids) {
    id = static_cast<int>(edges_.size());
    edges_.push_back({key, (vertices_[key[1]] - vertices_[key[0]]).normalized()});
  }

  const int nt = num_tets();
  tet_faces_.resize(nt);
  tet_face_signs_.resize(nt);
  tet_edges_.resize(nt);
  std::vector<std::array<int, 2>> incident(faces_.size(), {-1, -1});
  for (int ti = 0; ti < nt; ++ti) {
    const auto& t = tets_[ti];
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> key{t[(i + 1) % 4], t[(i + 2) % 4], t[(i + 3) % 4]};
      std::sort(key.begin(), key.end());
      const int fid = face_ids.at(key);
      tet_faces_[ti][i] = fid;
      const Vec3 fc = (vertices_[key[0]] + vertices_[key[1]] + vertices_[key[2]]) / 3.0;
      tet_face_signs_[ti][i] = faces_[fid].normal.dot(fc - vertices_[t[i]]) > 0 ? 1 : -1;
      auto& inc = incident[fid];
      if (inc[0] < 0)
        inc[0] = ti;
      else if (inc[1] < 0)
        inc[1] = ti;
      else
        throw InvalidArgument("face shared by more than two tets");
    }
    for (int e = 0; e < 6; ++e) {
      const int a = t[kTetEdges[e][0]], b = t[kTetEdges[e][1]];
      tet_edges_[ti][e] = edge_ids.at({std::min(a, b), std::max(a, b)});
    }
  }

  for (std::size_t fid = 0; fid < faces_.size(); ++fid) {
    auto& f = faces_[fid];
    auto inc = incident[fid];
    f.boundary = inc[1] < 0;
    if (!f.boundary) {
      // put the tet the normal points out of first
      const int t0 = inc[0];
      int local = 0;
      while (tet_faces_[t0][local] != static_cast<int>(fid)) ++local;
      if (tet_face_signs_[t0][local] < 0) std::swap(inc[0], inc[1]);
    }
    f.tets = inc;
  }
}

int TetMesh::num_boundary_faces() const
{
  return static_cast<int>(std::count_if(faces_.begin(), faces_.end(), [](const Face& f) { return f.boundary; }));
}

std::array<Vec3, 4> TetMesh::tet_points(int t) const
{
  const auto& v = tets_[t];
  return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]], vertices_[v[3]]};
}

std::array<Vec3, 3> TetMesh::face_points(int f) const
{
  const auto& v = faces_[f].v;
  return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
}

double TetMesh::tet_volume(int t) const
{
  const auto p = tet_points(t);
  return signed_volume(p[0], p[1], p[2], p[3]);
}

TetMesh build_box_mesh(int n, const Vec3& extent)
{
  if (n < 1) throw InvalidArgument("build_box_mesh: n must be >= 1");
  if (!(extent.minCoeff() > 0)) throw InvalidArgument("build_box_mesh: extents must be positive");

  const int m = n + 1;
  auto vid = [m](int i, int j, int k) { return i + m * (j + m * k); };

  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(m) * m * m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        vertices.emplace_back(extent[0] * i / n, extent[1] * j / n, extent[2] * k / n);

  // Each cube is split along its main diagonal: one tet per monotone lattice
  // path from the low corner to the high corner.
  static constexpr std::array<std::array<int, 3>, 6> kPaths = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

  std::vector<std::array<int, 4>> tets;
  tets.reserve(6 * static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& path : kPaths) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> t;
          t[0] = vid(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[path[s]];
            t[s + 1] = vid(c[0], c[1], c[2]);
          }
          tets.push_back(t);
        }
  return TetMesh(std::move(vertices), std::move(tets));
}

MeshQuality mesh_quality(const TetMesh& mesh)
{
  MeshQuality q;
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto p = mesh.tet_points(t);
    const double diam = tet_diameter(p);
    if (!(mesh.tet_volume(t) > 1e-12 * diam * diam * diam))
      throw DegenerateGeometry("mesh_quality: degenerate tet " + std::to_string(t));
    q.h_max = std::max(q.h_max, diam);
    q.shape_ratio = std::max(q.shape_ratio, diam / inscribed_diameter(p));
  }
  return q;
}

void write_mesh(std::ostream& os, const TetMesh& mesh)
{
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices())
    os << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const auto& t : mesh.tets())
    os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
}

TetMesh read_mesh(std::istream& is)
{
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p[0] >> p[1] >> p[2])) throw InvalidArgument("malformed vertex record: " + line);
      vertices.push_back(p);
    } else if (tag == "t") {
      std::array<int, 4> t;
      if (!(ls >> t[0] >> t[1] >> t[2] >> t[3])) throw InvalidArgument("malformed tet record: " + line);
      tets.push_back(t);
    } else {
      throw InvalidArgument("unknown mesh record '" + tag + "'");
    }
  }
  return TetMesh(std::move(vertices), std::move(tets));
}

}  // namespace ncmixed
