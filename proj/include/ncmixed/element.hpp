#pragma once

#include "ncmixed/common.hpp"
#include "ncmixed/polyquad.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

namespace ncmixed {

class TetMesh;

using TensorFunction = std::function<Mat3(const Vec3&)>;
using VectorFunction = std::function<Vec3(const Vec3&)>;

/// Orthogonal projection onto the plane normal to a unit vector: Q = I - u u^T.
struct TangentProjector {
  Vec3 u;
  explicit TangentProjector(const Vec3& dir) : u(dir.normalized()) {}
  Mat3 matrix() const { return Mat3::Identity() - u * u.transpose(); }
};

/// Deterministic orthonormal pair spanning the plane normal to s:
/// t1 = normalize(s x m) with m the coordinate axis least aligned with s,
/// t2 = s x t1.
std::array<Vec3, 2> edge_normal_pair(const Vec3& s);

/// Tet vertices plus the global vertex ids that fix face/edge orientation.
struct TetGeometry {
  std::array<Vec3, 4> p;
  std::array<int, 4> ids{0, 1, 2, 3};

  TetGeometry() = default;
  explicit TetGeometry(const std::array<Vec3, 4>& pts, const std::array<int, 4>& global_ids = {0, 1, 2, 3});
  static TetGeometry from_mesh(const TetMesh& mesh, int t);

  double volume() const;
  /// Local vertex indices of face i (opposite vertex i), sorted by global id.
  std::array<int, 3> face_vertices(int i) const;
  /// Normal of face i from its sorted vertices (not necessarily outward).
  Vec3 face_normal(int i) const;
  /// +1 if face_normal(i) points out of the tet.
  int face_orientation(int i) const;
  double face_area(int i) const;
  ElementFrame frame() const { return make_frame(p); }
};

/// Which functional a local stress dof is.
struct DofDescriptor {
  enum class Kind { face_moment, cell_moment } kind;
  int local_face = -1;   // face_moment: local face index
  int weight_vertex = -1;  // face_moment: position (0..2) of the weight's vertex in sorted face order
  int component = -1;    // face_moment: Cartesian component k; cell_moment: sym component 0..5
};

inline int num_stress_dofs(Variant v) { return v == Variant::full ? 42 : 36; }
inline int num_displacement_dofs(Variant v) { return v == Variant::full ? 12 : 6; }

/// Local dof layout: 9 moments per face in local face order (weight vertex major,
/// component minor), then the 6 cell integrals for the full variant.
std::vector<DofDescriptor> stress_dof_layout(Variant v);

/// Dual stress basis of the element, as coefficients over the 60 quadratic
/// symmetric-tensor monomials in element coordinates.
struct StressShapeBasis {
  Variant variant = Variant::full;
  TetGeometry geometry;
  ElementFrame frame;
  Eigen::MatrixXd coeffs;  // 60 x n, column j is basis field j
  std::vector<DofDescriptor> dofs;
  /// Condition number of the measure-normalized dof matrix on an L2-orthonormal
  /// basis of the shape space.
  double condition = 0.0;

  int size() const { return static_cast<int>(coeffs.cols()); }
  Mat3 value(int j, const Vec3& x) const;
  Vec3 divergence(int j, const Vec3& x) const;
  /// Field given by local dof values.
  Eigen::VectorXd combine(const Eigen::VectorXd& local_dofs) const { return coeffs * local_dofs; }
};

/// Displacement shape functions as coefficients over the 12 linear vector
/// monomials (component-major, see eval_linear_vector).
struct DisplacementShapeBasis {
  Variant variant = Variant::full;
  ElementFrame frame;
  Eigen::MatrixXd coeffs;  // 12 x n

  int size() const { return static_cast<int>(coeffs.cols()); }
  Vec3 value(int j, const Vec3& x) const;
};

/// Second-difference rows of the tangential-tangential edge constraints (18 x 60).
Eigen::MatrixXd edge_constraint_matrix(const TetGeometry& K);

/// Rows forcing the symmetric gradient of div(sigma) to vanish (6 x 60).
Eigen::MatrixXd rigid_divergence_constraint_matrix(const TetGeometry& K);

/// Dof functionals applied to the 60 monomial tensor fields (n x 60), exact.
Eigen::MatrixXd dof_matrix_on_monomials(const TetGeometry& K, Variant v);

/// L2(K) Frobenius Gram matrix of the 60 monomial tensor fields.
Eigen::MatrixXd tensor_gram_matrix(const TetGeometry& K);

/// L2(K) Gram matrix of the 10 scalar quadratic monomials.
Eigen::Matrix<double, 10, 10> scalar_mass_matrix(const TetGeometry& K);

/// Coefficients (12 x 60) of div of each monomial tensor field in the linear
/// vector monomial basis.
Eigen::MatrixXd divergence_matrix(const TetGeometry& K);

inline constexpr double kMaxDofCondition = 1e8;

StressShapeBasis build_stress_basis(const TetGeometry& K, Variant v);
DisplacementShapeBasis build_displacement_basis(const TetGeometry& K, Variant v);

/// Degrees of freedom of a smooth symmetric tensor field. Face integrals use a
/// triangle rule of at least face_degree (>= 3 keeps quadratics exact).
Eigen::VectorXd stress_dofs(const TetGeometry& K, const TensorFunction& tau, Variant v,
                            int face_degree = 8, int cell_degree = 8);

/// Barycentric coordinates as affine functions of element coordinates:
/// column m holds (c, g_x, g_y, g_z) with lambda_m(xi) = c + g . xi.
Eigen::Matrix4d barycentric_affine(const TetGeometry& K);

/// Scalar quadratic coefficients of a product of two affine functions.
std::array<double, 10> affine_product(const Eigen::Vector4d& a, const Eigen::Vector4d& b);

/// Explicit quadratic p with p|_e linear, p(v_k) = beta, p(v_l) = gamma, p
/// orthogonal to P1 on faces i and j, and zero mean, where k < l are the
/// remaining local indices. Returns coefficients over the element monomials.
std::array<double, 10> lemma_polynomial(const TetGeometry& K, int i, int j, double beta, double gamma);

struct LemmaCheck {
  double edge_second_difference = 0.0;  // p is linear along the edge
  double vertex_k_error = 0.0;          // p(v_k) - beta
  double vertex_l_error = 0.0;
  double face_i_moment = 0.0;           // max P1 moment on face i / |f|
  double face_j_moment = 0.0;
  double cell_mean = 0.0;               // |integral| / |K|
  double vertex_i_error = 0.0;          // p(v_i) - 3(beta+gamma)/2
  double vertex_j_error = 0.0;

  double max_residual() const;
};

LemmaCheck check_lemma_polynomial(const TetGeometry& K, int i, int j, double beta, double gamma);

struct VertexSystem {
  Eigen::Matrix<double, 12, 12> matrix;
  double determinant = 0.0;
};

/// Unknowns beta_lk over lexicographically ordered distinct pairs (l,k); one
/// equation a(beta_lj + beta_jl) + b(beta_lk + beta_jk) = 0 per pair (i,k).
VertexSystem vertex_system_matrix(double a, double b);

/// 16 (2a - b)^2 b^6 (a + b)^4
double vertex_system_determinant_closed_form(double a, double b);

}  // namespace ncmixed
