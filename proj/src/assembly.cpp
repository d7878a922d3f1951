#include "ncmixed/assembly.hpp"

#include <ostream>
#include <string>

namespace ncmixed {

DofMap::DofMap(const TetMesh& mesh, Variant v) : variant_(v), n_faces_(mesh.num_faces())
{
  const int T = mesh.num_tets();
  const int ns = local_stress_size(), nu = local_displacement_size();
  n_sigma_ = 9 * n_faces_ + (v == Variant::full ? 6 * T : 0);
  n_u_ = nu * T;
  stress_l2g_.resize(static_cast<std::size_t>(ns) * T);
  disp_l2g_.resize(static_cast<std::size_t>(nu) * T);
  for (int t = 0; t < T; ++t) {
    int* s = stress_l2g_.data() + static_cast<std::size_t>(ns) * t;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 9; ++k) s[9 * i + k] = face_offset(mesh.tet_face(t, i)) + k;
    if (v == Variant::full)
      for (int k = 0; k < 6; ++k) s[36 + k] = cell_offset(t) + k;
    for (int k = 0; k < nu; ++k) disp_l2g_[static_cast<std::size_t>(nu) * t + k] = displacement_offset(t) + k;
  }
}

int DofMap::cell_offset(int t) const { return variant_ == Variant::full ? 9 * n_faces_ + 6 * t : -1; }

std::span<const int> DofMap::stress_indices(int t) const
{
  const std::size_t n = local_stress_size();
  return {stress_l2g_.data() + n * t, n};
}

std::span<const int> DofMap::displacement_indices(int t) const
{
  const std::size_t n = local_displacement_size();
  return {disp_l2g_.data() + n * t, n};
}

MixedSpace::MixedSpace(const TetMesh& mesh, Variant v) : mesh_(&mesh), dofs_(mesh, v)
{
  const int T = mesh.num_tets();
  geometry_.reserve(T);
  stress_.reserve(T);
  disp_.reserve(T);
  for (int t = 0; t < T; ++t) {
    geometry_.push_back(TetGeometry::from_mesh(mesh, t));
    stress_.push_back(build_stress_basis(geometry_.back(), v));
    disp_.push_back(build_displacement_basis(geometry_.back(), v));
  }
}

double MixedSpace::max_condition() const
{
  double c = 0.0;
  for (const auto& b : stress_) c = std::max(c, b.condition);
  return c;
}

IsotropicCompliance::IsotropicCompliance(double lambda_, double mu_) : lambda(lambda_), mu(mu_)
{
  if (!(mu > 0.0)) throw InvalidArgument("compliance: mu must be positive");
  if (!(lambda >= 0.0)) throw InvalidArgument("compliance: lambda must be nonnegative");
}

Eigen::Matrix<double, 6, 6> IsotropicCompliance::component_matrix() const
{
  const double kappa = lambda / (3.0 * lambda + 2.0 * mu);
  Eigen::Matrix<double, 6, 6> C = Eigen::Matrix<double, 6, 6>::Zero();
  for (int c = 0; c < 6; ++c) C(c, c) = kSymWeight[c];
  for (int a : {0, 3, 5})
    for (int b : {0, 3, 5}) C(a, b) -= kappa;
  return C / (2.0 * mu);
}

Eigen::Matrix<double, 6, 6> IsotropicCompliance::orthonormal_matrix() const
{
  Eigen::Matrix<double, 6, 1> s;
  for (int c = 0; c < 6; ++c) s[c] = 1.0 / std::sqrt(kSymWeight[c]);
  return s.asDiagonal() * component_matrix() * s.asDiagonal();
}

Mat3 compliance_apply(const IsotropicCompliance& c, const Mat3& tau)
{
  if (!(c.mu > 0.0)) throw InvalidArgument("compliance_apply: mu must be positive");
  const double kappa = c.lambda / (3.0 * c.lambda + 2.0 * c.mu);
  return (tau - kappa * tau.trace() * Mat3::Identity()) / (2.0 * c.mu);
}

Mat3 stiffness_apply(const IsotropicCompliance& c, const Mat3& eps)
{
  return 2.0 * c.mu * eps + c.lambda * eps.trace() * Mat3::Identity();
}

Eigen::SparseMatrix<double> SaddleSystem::matrix() const
{
  const int ns = num_stress(), nu = num_displacement();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(A.nonZeros() + 2 * B.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < B.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(B, k); it; ++it) {
      trips.emplace_back(ns + it.row(), it.col(), it.value());
      trips.emplace_back(it.col(), ns + it.row(), it.value());
    }
  Eigen::SparseMatrix<double> K(ns + nu, ns + nu);
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

Eigen::VectorXd SaddleSystem::rhs() const
{
  Eigen::VectorXd b(G.size() + F.size());
  b << G, F;
  return b;
}

ElementSystem element_system(const TetGeometry& K, const StressShapeBasis& sb, const DisplacementShapeBasis& db,
                             const IsotropicCompliance& c, const VectorFunction& f)
{
  const Eigen::Matrix<double, 10, 10> S = scalar_mass_matrix(K);
  const Eigen::Matrix<double, 6, 6> C = c.component_matrix();

  Eigen::MatrixXd GA(kNumTensorQuadratics, kNumTensorQuadratics);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) GA.block<10, 10>(10 * a, 10 * b) = C(a, b) * S;

  Eigen::MatrixXd Mv = Eigen::MatrixXd::Zero(kNumVectorLinears, kNumVectorLinears);
  for (int k = 0; k < 3; ++k) Mv.block<4, 4>(4 * k, 4 * k) = S.topLeftCorner<4, 4>();

  ElementSystem e;
  e.A = sb.coeffs.transpose() * GA * sb.coeffs;
  e.A = 0.5 * (e.A + e.A.transpose()).eval();
  e.B = db.coeffs.transpose() * Mv * divergence_matrix(K) * sb.coeffs;

  Eigen::VectorXd Fm = Eigen::VectorXd::Zero(kNumVectorLinears);
  if (f) {
    const QuadRule& rule = simplex_quadrature(3, 8);
    const double vol = K.volume();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = bary_to_point(rule.points[q], K.p);
      const Vec3 xi = sb.frame.to_local(x);
      const Vec3 fx = f(x) * (vol * rule.weights[q]);
      for (int k = 0; k < 3; ++k) {
        Fm[4 * k] += fx[k];
        for (int d = 0; d < 3; ++d) Fm[4 * k + 1 + d] += fx[k] * xi[d];
      }
    }
  }
  e.F = db.coeffs.transpose() * Fm;
  return e;
}

namespace {

// Integral over a boundary face of (phi_j n) . g for the 60 monomial tensor fields.
Eigen::VectorXd boundary_moments(const TetMesh& mesh, int f, const Vec3& n_out, const ElementFrame& frame,
                                 const VectorFunction& g)
{
  const auto P = mesh.face_points(f);
  const double area = mesh.faces()[f].area;
  const QuadRule& rule = simplex_quadrature(2, 8);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(kNumTensorQuadratics);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec3 x = bary_to_point(rule.points[q], P);
    const Vec3 gx = g(x);
    const auto mono = quadratic_monomials(frame.to_local(x));
    const double w = area * rule.weights[q];
    for (int c = 0; c < 6; ++c) {
      const auto [i, j] = kSymIndex[c];
      const double tn = (i == j) ? n_out[i] * gx[i] : n_out[j] * gx[i] + n_out[i] * gx[j];
      for (int a = 0; a < 10; ++a) m[10 * c + a] += w * tn * mono[a];
    }
  }
  return m;
}

}  // namespace

SaddleSystem assemble_system(const MixedSpace& space, const IsotropicCompliance& c, const VectorFunction& f,
                             const VectorFunction& g)
{
  if (!(c.mu > 0.0)) throw InvalidArgument("assemble_system: mu must be positive");
  const TetMesh& mesh = space.mesh();
  const DofMap& dm = space.dofs();
  const int T = mesh.num_tets();
  const int ns = dm.local_stress_size(), nu = dm.local_displacement_size();

  SaddleSystem sys;
  sys.G = Eigen::VectorXd::Zero(dm.num_stress());
  sys.F = Eigen::VectorXd::Zero(dm.num_displacement());
  std::vector<Eigen::Triplet<double>> ta, tb;
  ta.reserve(static_cast<std::size_t>(T) * ns * ns);
  tb.reserve(static_cast<std::size_t>(T) * ns * nu);

  for (int t = 0; t < T; ++t) {
    const ElementSystem e =
        element_system(space.geometry(t), space.stress_basis(t), space.displacement_basis(t), c, f);
    const auto si = dm.stress_indices(t);
    const auto ui = dm.displacement_indices(t);
    for (int j = 0; j < ns; ++j)
      for (int i = 0; i < ns; ++i) ta.emplace_back(si[i], si[j], e.A(i, j));
    for (int j = 0; j < ns; ++j)
      for (int i = 0; i < nu; ++i) tb.emplace_back(ui[i], si[j], e.B(i, j));
    for (int i = 0; i < nu; ++i) sys.F[ui[i]] += e.F[i];
  }

  if (g) {
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < 4; ++i) {
        const int f_id = mesh.tet_face(t, i);
        const Face& face = mesh.faces()[f_id];
        if (!face.boundary) continue;
        const StressShapeBasis& sb = space.stress_basis(t);
        const Vec3 n_out = mesh.face_sign(t, i) * face.normal;
        const Eigen::VectorXd local = sb.coeffs.transpose() * boundary_moments(mesh, f_id, n_out, sb.frame, g);
        const auto si = dm.stress_indices(t);
        for (int k = 0; k < ns; ++k) sys.G[si[k]] += local[k];
      }
  }

  sys.A.resize(dm.num_stress(), dm.num_stress());
  sys.A.setFromTriplets(ta.begin(), ta.end());
  sys.B.resize(dm.num_displacement(), dm.num_stress());
  sys.B.setFromTriplets(tb.begin(), tb.end());
  return sys;
}

void write_system(std::ostream& os, const SaddleSystem& sys)
{
  const Eigen::SparseMatrix<double> K = sys.matrix();
  const Eigen::VectorXd b = sys.rhs();
  os.precision(17);
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << "% saddle matrix [[A, B^T], [B, 0]], n_sigma " << sys.num_stress() << ", n_u " << sys.num_displacement()
     << "\n";
  os << K.rows() << ' ' << K.cols() << ' ' << K.nonZeros() << '\n';
  for (int k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
  os << "%%MatrixMarket matrix array real general\n";
  os << "% right-hand side [G; F]\n";
  os << b.size() << " 1\n";
  for (int i = 0; i < b.size(); ++i) os << b[i] << '\n';
}

}  // namespace ncmixed
