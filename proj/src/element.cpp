#include "ncmixed/element.hpp"

#include "ncmixed/mesh.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ncmixed {

namespace {

using Components = Eigen::Matrix<double, 6, Eigen::Dynamic>;

// Unit symmetric tensor for stored component c.
Mat3 unit_tensor(int c)
{
  Mat3 e = Mat3::Zero();
  const auto [i, j] = kSymIndex[c];
  e(i, j) = e(j, i) = 1.0;
  return e;
}

// Weight of stored component c in a^T sigma b.
double bilinear_weight(int c, const Vec3& a, const Vec3& b)
{
  const auto [i, j] = kSymIndex[c];
  return i == j ? a[i] * b[i] : a[i] * b[j] + a[j] * b[i];
}

// sigma n for every column of a 6 x ncols component block.
Eigen::Matrix<double, 3, Eigen::Dynamic> traction(const Components& comps, const Vec3& n)
{
  Eigen::Matrix<double, 6, 3> map;
  for (int c = 0; c < 6; ++c) map.row(c) = (unit_tensor(c) * n).transpose();
  return map.transpose() * comps;
}

template <class Eval>
Eigen::MatrixXd apply_dofs(const TetGeometry& K, Variant v, const Eval& eval, int ncols, int face_degree,
                           int cell_degree)
{
  const int ndofs = num_stress_dofs(v);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ndofs, ncols);
  const QuadRule& tri = simplex_quadrature(2, std::max(face_degree, 3));
  for (int i = 0; i < 4; ++i) {
    const auto fv = K.face_vertices(i);
    const std::array<Vec3, 3> fp{K.p[fv[0]], K.p[fv[1]], K.p[fv[2]]};
    const Vec3 n = K.face_normal(i);
    const double area = K.face_area(i);
    for (std::size_t q = 0; q < tri.size(); ++q) {
      const auto& b = tri.points[q];
      const Vec3 x = bary_to_point(b, fp);
      const auto tn = traction(eval(x), n);
      for (int a = 0; a < 3; ++a)
        out.middleRows(9 * i + 3 * a, 3) += (area * tri.weights[q] * b[a]) * tn;
    }
  }
  if (v == Variant::full) {
    const QuadRule& tet = simplex_quadrature(3, cell_degree);
    const double vol = K.volume();
    for (std::size_t q = 0; q < tet.size(); ++q) {
      const Vec3 x = bary_to_point(tet.points[q], K.p);
      out.bottomRows(6) += (vol * tet.weights[q]) * eval(x);
    }
  }
  return out;
}

Components monomial_components(const ElementFrame& frame, const Vec3& x)
{
  const auto m = quadratic_monomials(frame.to_local(x));
  Components c = Components::Zero(6, kNumTensorQuadratics);
  for (int comp = 0; comp < 6; ++comp)
    for (int i = 0; i < 10; ++i) c(comp, comp * 10 + i) = m[i];
  return c;
}

double second_difference(const std::array<double, 10>& coeffs, const ElementFrame& frame, const Vec3& a,
                         const Vec3& b)
{
  return eval_poly(coeffs, frame, a) - 2.0 * eval_poly(coeffs, frame, 0.5 * (a + b)) + eval_poly(coeffs, frame, b);
}

}  // namespace

std::array<Vec3, 2> edge_normal_pair(const Vec3& s_in)
{
  const Vec3 s = s_in.normalized();
  int axis = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(s[k]) < std::abs(s[axis])) axis = k;
  const Vec3 t1 = s.cross(Vec3::Unit(axis)).normalized();
  return {t1, s.cross(t1)};
}

TetGeometry::TetGeometry(const std::array<Vec3, 4>& pts, const std::array<int, 4>& global_ids)
    : p(pts), ids(global_ids)
{
}

TetGeometry TetGeometry::from_mesh(const TetMesh& mesh, int t) { return TetGeometry(mesh.tet_points(t), mesh.tets()[t]); }

double TetGeometry::volume() const { return std::abs(signed_volume(p[0], p[1], p[2], p[3])); }

std::array<int, 3> TetGeometry::face_vertices(int i) const
{
  std::array<int, 3> f{(i + 1) % 4, (i + 2) % 4, (i + 3) % 4};
  std::sort(f.begin(), f.end(), [this](int a, int b) { return ids[a] < ids[b]; });
  return f;
}

Vec3 TetGeometry::face_normal(int i) const
{
  const auto f = face_vertices(i);
  return (p[f[1]] - p[f[0]]).cross(p[f[2]] - p[f[0]]).normalized();
}

int TetGeometry::face_orientation(int i) const
{
  const auto f = face_vertices(i);
  const Vec3 c = (p[f[0]] + p[f[1]] + p[f[2]]) / 3.0;
  return face_normal(i).dot(c - p[i]) > 0 ? 1 : -1;
}

double TetGeometry::face_area(int i) const
{
  const auto f = face_vertices(i);
  return 0.5 * (p[f[1]] - p[f[0]]).cross(p[f[2]] - p[f[0]]).norm();
}

std::vector<DofDescriptor> stress_dof_layout(Variant v)
{
  std::vector<DofDescriptor> d;
  for (int i = 0; i < 4; ++i)
    for (int a = 0; a < 3; ++a)
      for (int k = 0; k < 3; ++k) d.push_back({DofDescriptor::Kind::face_moment, i, a, k});
  if (v == Variant::full)
    for (int c = 0; c < 6; ++c) d.push_back({DofDescriptor::Kind::cell_moment, -1, -1, c});
  return d;
}

Mat3 StressShapeBasis::value(int j, const Vec3& x) const
{
  return eval_sym_tensor({coeffs.col(j).data(), static_cast<std::size_t>(coeffs.rows())}, frame, x);
}

Vec3 StressShapeBasis::divergence(int j, const Vec3& x) const
{
  return eval_sym_tensor_div({coeffs.col(j).data(), static_cast<std::size_t>(coeffs.rows())}, frame, x);
}

Vec3 DisplacementShapeBasis::value(int j, const Vec3& x) const
{
  return eval_linear_vector({coeffs.col(j).data(), static_cast<std::size_t>(coeffs.rows())}, frame, x);
}

Eigen::MatrixXd edge_constraint_matrix(const TetGeometry& K)
{
  if (!(K.volume() > 1e-14 * std::pow(K.frame().h, 3)))
    throw DegenerateGeometry("edge_constraint_matrix: degenerate tet");
  const ElementFrame frame = K.frame();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(18, kNumTensorQuadratics);
  for (int e = 0; e < 6; ++e) {
    const Vec3& a = K.p[kTetEdges[e][0]];
    const Vec3& b = K.p[kTetEdges[e][1]];
    const auto [t1, t2] = edge_normal_pair(b - a);
    const auto ma = quadratic_monomials(frame.to_local(a));
    const auto mm = quadratic_monomials(frame.to_local(0.5 * (a + b)));
    const auto mb = quadratic_monomials(frame.to_local(b));
    const std::array<std::pair<Vec3, Vec3>, 3> pairs{{{t1, t1}, {t1, t2}, {t2, t2}}};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 6; ++c) {
        const double w = bilinear_weight(c, pairs[r].first, pairs[r].second);
        for (int m = 0; m < 10; ++m) C(3 * e + r, c * 10 + m) = w * (ma[m] - 2.0 * mm[m] + mb[m]);
      }
  }
  return C;
}

Eigen::MatrixXd rigid_divergence_constraint_matrix(const TetGeometry& /*K*/)
{
  // Second derivatives of quadratic monomials are constants: H[m](a,b).
  std::array<Mat3, 10> H;
  for (int m = 0; m < 10; ++m) {
    H[m].setZero();
    const auto& e = kMonomialExponents[m];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        std::array<int, 3> r = e;
        double f = r[a]--;
        f *= r[b]--;
        if (r[0] >= 0 && r[1] >= 0 && r[2] >= 0) H[m](a, b) = f;
      }
  }
  // eps(div sigma)_kl = 1/2 sum_j (d_l d_j sigma_kj + d_k d_j sigma_lj), in element coordinates.
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(6, kNumTensorQuadratics);
  for (int row = 0; row < 6; ++row) {
    const auto [k, l] = kSymIndex[row];
    for (int c = 0; c < 6; ++c) {
      const Mat3 E = unit_tensor(c);
      for (int m = 0; m < 10; ++m) {
        double v = 0.0;
        for (int j = 0; j < 3; ++j) v += 0.5 * (E(k, j) * H[m](l, j) + E(l, j) * H[m](k, j));
        R(row, c * 10 + m) = v;
      }
    }
  }
  return R;
}

Eigen::MatrixXd dof_matrix_on_monomials(const TetGeometry& K, Variant v)
{
  const ElementFrame frame = K.frame();
  return apply_dofs(K, v, [&](const Vec3& x) { return monomial_components(frame, x); }, kNumTensorQuadratics, 4, 4);
}

Eigen::Matrix<double, 10, 10> scalar_mass_matrix(const TetGeometry& K)
{
  const ElementFrame frame = K.frame();
  const QuadRule& rule = simplex_quadrature(3, 4);
  const double vol = K.volume();
  Eigen::Matrix<double, 10, 10> S = Eigen::Matrix<double, 10, 10>::Zero();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto m = quadratic_monomials(frame.to_local(bary_to_point(rule.points[q], K.p)));
    const Eigen::Map<const Eigen::Matrix<double, 10, 1>> mv(m.data());
    S += (vol * rule.weights[q]) * mv * mv.transpose();
  }
  return S;
}

Eigen::MatrixXd tensor_gram_matrix(const TetGeometry& K)
{
  const auto S = scalar_mass_matrix(K);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(kNumTensorQuadratics, kNumTensorQuadratics);
  for (int c = 0; c < 6; ++c) G.block<10, 10>(10 * c, 10 * c) = kSymWeight[c] * S;
  return G;
}

Eigen::MatrixXd divergence_matrix(const TetGeometry& K)
{
  const double h = K.frame().h;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(kNumVectorLinears, kNumTensorQuadratics);
  for (int c = 0; c < 6; ++c) {
    const Mat3 E = unit_tensor(c);
    for (int m = 0; m < 10; ++m) {
      for (int j = 0; j < 3; ++j) {
        std::array<int, 3> e = kMonomialExponents[m];
        if (e[j] == 0) continue;
        const double f = e[j]--;
        // remaining monomial has degree <= 1
        int lin = 0;
        for (int k = 0; k < 3; ++k)
          if (e[k] == 1) lin = 1 + k;
        for (int i = 0; i < 3; ++i)
          if (E(i, j) != 0.0) D(4 * i + lin, c * 10 + m) += f * E(i, j) / h;
      }
    }
  }
  return D;
}

StressShapeBasis build_stress_basis(const TetGeometry& K, Variant v)
{
  Eigen::MatrixXd C = edge_constraint_matrix(K);
  if (v == Variant::reduced) {
    Eigen::MatrixXd Cr(C.rows() + 6, C.cols());
    Cr << C, rigid_divergence_constraint_matrix(K);
    C = std::move(Cr);
  }
  const int ndofs = num_stress_dofs(v);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = 1e-10 * sv[0];
  const int rank = static_cast<int>((sv.array() > cut).count());
  if (kNumTensorQuadratics - rank != ndofs)
    throw UnisolvenceFailure("build_stress_basis: shape space has dimension " +
                                 std::to_string(kNumTensorQuadratics - rank) + ", expected " + std::to_string(ndofs),
                             0.0);
  const Eigen::MatrixXd N = svd.matrixV().rightCols(ndofs);

  const Eigen::MatrixXd D = dof_matrix_on_monomials(K, v);
  const Eigen::MatrixXd M = D * N;

  // Scale-free conditioning: L2-orthonormal shape basis, dofs divided by the
  // measure of their support, off-diagonal cell moments weighted by sqrt(2).
  const Eigen::MatrixXd G = tensor_gram_matrix(K);
  const Eigen::LLT<Eigen::MatrixXd> llt(N.transpose() * G * N);
  const Eigen::MatrixXd Ng = llt.matrixU().solve<Eigen::OnTheRight>(N);
  Eigen::MatrixXd Dn = D * Ng;
  for (int i = 0; i < 4; ++i) Dn.middleRows(9 * i, 9) /= K.face_area(i);
  if (v == Variant::full)
    for (int c = 0; c < 6; ++c) Dn.row(36 + c) *= std::sqrt(kSymWeight[c]) / K.volume();
  Eigen::JacobiSVD<Eigen::MatrixXd> msvd(Dn);
  const auto& msv = msvd.singularValues();
  const double cond = msv[ndofs - 1] > 0 ? msv[0] / msv[ndofs - 1] : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxDofCondition))
    throw UnisolvenceFailure("build_stress_basis: dof matrix condition number " + std::to_string(cond) +
                                 " exceeds 1e8",
                             cond);

  StressShapeBasis basis;
  basis.variant = v;
  basis.geometry = K;
  basis.frame = K.frame();
  basis.coeffs = N * M.partialPivLu().inverse();
  basis.dofs = stress_dof_layout(v);
  basis.condition = cond;
  return basis;
}

DisplacementShapeBasis build_displacement_basis(const TetGeometry& K, Variant v)
{
  if (!(K.volume() > 1e-14 * std::pow(K.frame().h, 3)))
    throw DegenerateGeometry("build_displacement_basis: degenerate tet");
  DisplacementShapeBasis basis;
  basis.variant = v;
  basis.frame = K.frame();
  if (v == Variant::full) {
    basis.coeffs = Eigen::MatrixXd::Identity(kNumVectorLinears, kNumVectorLinears);
    return basis;
  }
  basis.coeffs = Eigen::MatrixXd::Zero(kNumVectorLinears, 6);
  for (int k = 0; k < 3; ++k) basis.coeffs(4 * k, k) = 1.0;
  // infinitesimal rotations e_r x xi about the centroid
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < 3; ++j) {
      const Vec3 col = Vec3::Unit(r).cross(Vec3::Unit(j));
      for (int k = 0; k < 3; ++k) basis.coeffs(4 * k + 1 + j, 3 + r) = col[k];
    }
  return basis;
}

Eigen::VectorXd stress_dofs(const TetGeometry& K, const TensorFunction& tau, Variant v, int face_degree,
                            int cell_degree)
{
  return apply_dofs(K, v, [&](const Vec3& x) -> Components { return to_components(tau(x)); }, 1, face_degree,
                    cell_degree)
      .col(0);
}

Eigen::Matrix4d barycentric_affine(const TetGeometry& K)
{
  const ElementFrame frame = K.frame();
  Eigen::Matrix4d P;
  for (int a = 0; a < 4; ++a) {
    P(a, 0) = 1.0;
    P.block<1, 3>(a, 1) = frame.to_local(K.p[a]).transpose();
  }
  // rows of P times column m of P^{-1} = delta
  return P.inverse();
}

std::array<double, 10> affine_product(const Eigen::Vector4d& a, const Eigen::Vector4d& b)
{
  std::array<double, 10> r{};
  r[0] = a[0] * b[0];
  for (int k = 0; k < 3; ++k) r[1 + k] = a[0] * b[1 + k] + b[0] * a[1 + k];
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      std::array<int, 3> e{0, 0, 0};
      ++e[k];
      ++e[l];
      r[monomial_index(e)] += a[1 + k] * b[1 + l];
    }
  return r;
}

namespace {

std::array<int, 2> remaining_pair(int i, int j)
{
  std::array<int, 2> kl{};
  int n = 0;
  for (int m = 0; m < 4; ++m)
    if (m != i && m != j) kl[n++] = m;
  return kl;
}

}  // namespace

std::array<double, 10> lemma_polynomial(const TetGeometry& K, int i, int j, double beta, double gamma)
{
  if (i == j || i < 0 || j < 0 || i > 3 || j > 3)
    throw InvalidArgument("lemma_polynomial: face indices must be distinct and in 0..3");
  const auto [k, l] = remaining_pair(i, j);
  const Eigen::Matrix4d L = barycentric_affine(K);
  std::array<double, 10> p{};
  auto add = [&](double c, int a, int b) {
    if (c == 0.0) return;
    const auto prod = affine_product(L.col(a), L.col(b));
    for (int m = 0; m < 10; ++m) p[m] += c * prod[m];
  };
  const double s = beta + gamma;
  add(beta, k, k);
  add(s, k, l);
  add(gamma, l, l);
  add(1.5 * s, i, i);
  add(1.5 * s, j, j);
  add(-5.0 * beta - gamma, i, k);
  add(-5.0 * beta - gamma, j, k);
  add(-beta - 5.0 * gamma, i, l);
  add(-beta - 5.0 * gamma, j, l);
  add(3.0 * s, i, j);
  return p;
}

double LemmaCheck::max_residual() const
{
  return std::max({std::abs(edge_second_difference), std::abs(vertex_k_error), std::abs(vertex_l_error),
                   std::abs(face_i_moment), std::abs(face_j_moment), std::abs(cell_mean), std::abs(vertex_i_error),
                   std::abs(vertex_j_error)});
}

LemmaCheck check_lemma_polynomial(const TetGeometry& K, int i, int j, double beta, double gamma)
{
  const auto p = lemma_polynomial(K, i, j, beta, gamma);
  const auto [k, l] = remaining_pair(i, j);
  const ElementFrame frame = K.frame();
  const Eigen::Matrix4d L = barycentric_affine(K);
  LemmaCheck r;
  r.edge_second_difference = second_difference(p, frame, K.p[k], K.p[l]);
  r.vertex_k_error = eval_poly(p, frame, K.p[k]) - beta;
  r.vertex_l_error = eval_poly(p, frame, K.p[l]) - gamma;
  r.vertex_i_error = eval_poly(p, frame, K.p[i]) - 1.5 * (beta + gamma);
  r.vertex_j_error = eval_poly(p, frame, K.p[j]) - 1.5 * (beta + gamma);

  const QuadRule& tri = simplex_quadrature(2, 4);
  auto face_moment = [&](int face) {
    const std::array<Vec3, 3> fp{K.p[(face + 1) % 4], K.p[(face + 2) % 4], K.p[(face + 3) % 4]};
    double worst = 0.0;
    for (int a = 0; a < 4; ++a) {
      if (a == face) continue;
      double m = 0.0;
      for (std::size_t q = 0; q < tri.size(); ++q) {
        const Vec3 x = bary_to_point(tri.points[q], fp);
        const Vec3 xi = frame.to_local(x);
        const double lam = L(0, a) + L.block<3, 1>(1, a).dot(xi);
        m += tri.weights[q] * eval_poly(p, frame, x) * lam;
      }
      worst = std::max(worst, std::abs(m));
    }
    return worst;
  };
  r.face_i_moment = face_moment(i);
  r.face_j_moment = face_moment(j);

  const QuadRule& tet = simplex_quadrature(3, 2);
  double mean = 0.0;
  for (std::size_t q = 0; q < tet.size(); ++q) mean += tet.weights[q] * eval_poly(p, frame, bary_to_point(tet.points[q], K.p));
  r.cell_mean = mean;
  return r;
}

VertexSystem vertex_system_matrix(double a, double b)
{
  auto pair_index = [](int p, int q) { return 3 * p + (q < p ? q : q - 1); };
  VertexSystem sys;
  sys.matrix.setZero();
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      if (i == k) continue;
      const auto [j, l] = remaining_pair(i, k);
      const int row = pair_index(i, k);
      sys.matrix(row, pair_index(l, j)) += a;
      sys.matrix(row, pair_index(j, l)) += a;
      sys.matrix(row, pair_index(l, k)) += b;
      sys.matrix(row, pair_index(j, k)) += b;
    }
  sys.determinant = sys.matrix.partialPivLu().determinant();
  return sys;
}

double vertex_system_determinant_closed_form(double a, double b)
{
  const double t = 2.0 * a - b, s = a + b;
  return 16.0 * t * t * std::pow(b, 6) * std::pow(s, 4);
}

}  // namespace ncmixed
