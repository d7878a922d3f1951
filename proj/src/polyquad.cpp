#include "ncmixed/polyquad.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <string>

namespace ncmixed {

int BaryMonomial::degree() const { return std::accumulate(alpha.begin(), alpha.end(), 0); }

double bary_integral(const BaryMonomial& m, double measure)
{
  if (m.alpha.size() < 2) throw InvalidArgument("bary_integral: need at least 2 barycentric exponents");
  for (int a : m.alpha)
    if (a < 0) throw InvalidArgument("bary_integral: negative exponent");
  const int d = m.dim();
  // alpha! d! / (|alpha| + d)! = prod_i alpha_i! / ((d+1)(d+2)...(|alpha|+d)):
  // both sides have |alpha| factors, so pair them to keep the running value O(1).
  double r = measure;
  int den = m.degree() + d;
  for (int a : m.alpha)
    for (int k = 1; k <= a; ++k) r *= static_cast<double>(k) / den--;
  return r;
}

namespace {

struct Gauss1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Jacobi rule on [0,1] for the weight (1-t)^a, via Golub-Welsch.
Gauss1D gauss_jacobi(int npts, int a)
{
  const double alpha = a, beta = 0.0;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(npts, npts);
  for (int n = 0; n < npts; ++n) {
    const double s = 2.0 * n + alpha + beta;
    J(n, n) = (s == 0.0) ? (beta - alpha) / (alpha + beta + 2.0)
                         : (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (n + 1 < npts) {
      const double k = n + 1;
      const double sk = 2.0 * k + alpha + beta;
      const double b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + alpha + beta) /
                        (sk * sk * (sk + 1.0) * (sk - 1.0));
      J(n, n + 1) = J(n + 1, n) = std::sqrt(b2);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  // Total mass of (1-t)^a on [0,1].
  const double mu0 = 1.0 / (a + 1.0);
  Gauss1D g;
  for (int i = 0; i < npts; ++i) {
    g.nodes.push_back(0.5 * (1.0 + es.eigenvalues()[i]));
    const double v0 = es.eigenvectors()(0, i);
    g.weights.push_back(mu0 * v0 * v0);
  }
  return g;
}

// Collapsed-coordinate (conical product) rule.
QuadRule conical_rule(int d, int degree)
{
  const int npts = (degree + 2) / 2;
  QuadRule rule;
  rule.dim = d;
  rule.exact_degree = degree;
  if (d == 2) {
    const Gauss1D g1 = gauss_jacobi(npts, 1), g2 = gauss_jacobi(npts, 0);
    for (int i = 0; i < npts; ++i)
      for (int j = 0; j < npts; ++j) {
        const double l1 = g1.nodes[i];
        const double l2 = (1.0 - l1) * g2.nodes[j];
        rule.points.push_back({1.0 - l1 - l2, l1, l2, 0.0});
        rule.weights.push_back(2.0 * g1.weights[i] * g2.weights[j]);
      }
  } else {
    const Gauss1D g1 = gauss_jacobi(npts, 2), g2 = gauss_jacobi(npts, 1), g3 = gauss_jacobi(npts, 0);
    for (int i = 0; i < npts; ++i)
      for (int j = 0; j < npts; ++j)
        for (int k = 0; k < npts; ++k) {
          const double l1 = g1.nodes[i];
          const double l2 = (1.0 - l1) * g2.nodes[j];
          const double l3 = (1.0 - l1 - l2) * g3.nodes[k];
          rule.points.push_back({1.0 - l1 - l2 - l3, l1, l2, l3});
          rule.weights.push_back(6.0 * g1.weights[i] * g2.weights[j] * g3.weights[k]);
        }
  }
  return rule;
}

constexpr std::array<int, 6> kTabulatedDegrees = {1, 2, 4, 6, 8, 10};

struct RuleTable {
  std::array<QuadRule, 6> tri, tet;
  RuleTable()
  {
    for (std::size_t i = 0; i < kTabulatedDegrees.size(); ++i) {
      tri[i] = conical_rule(2, kTabulatedDegrees[i]);
      tet[i] = conical_rule(3, kTabulatedDegrees[i]);
    }
  }
};

}  // namespace

const QuadRule& simplex_quadrature(int d, int degree)
{
  if (d != 2 && d != 3) throw InvalidArgument("simplex_quadrature: dimension must be 2 or 3");
  static const RuleTable table;
  for (std::size_t i = 0; i < kTabulatedDegrees.size(); ++i)
    if (degree <= kTabulatedDegrees[i]) return d == 2 ? table.tri[i] : table.tet[i];
  throw UnsupportedDegree("simplex_quadrature: degree " + std::to_string(degree) + " exceeds 10");
}

ElementFrame make_frame(const std::array<Vec3, 4>& tet)
{
  ElementFrame f;
  f.centroid = 0.25 * (tet[0] + tet[1] + tet[2] + tet[3]);
  f.h = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) f.h = std::max(f.h, (tet[a] - tet[b]).norm());
  return f;
}

std::array<double, 10> quadratic_monomials(const Vec3& p)
{
  return {1.0, p[0], p[1], p[2], p[0] * p[0], p[0] * p[1], p[0] * p[2], p[1] * p[1], p[1] * p[2], p[2] * p[2]};
}

Eigen::Matrix<double, 3, 10> quadratic_monomial_gradients(const Vec3& p)
{
  Eigen::Matrix<double, 3, 10> g = Eigen::Matrix<double, 3, 10>::Zero();
  for (int m = 1; m < 10; ++m) {
    const auto& e = kMonomialExponents[m];
    for (int k = 0; k < 3; ++k) {
      if (e[k] == 0) continue;
      double v = e[k];
      for (int c = 0; c < 3; ++c) {
        const int pw = e[c] - (c == k ? 1 : 0);
        for (int r = 0; r < pw; ++r) v *= p[c];
      }
      g(k, m) = v;
    }
  }
  return g;
}

int monomial_index(const std::array<int, 3>& exps)
{
  for (int m = 0; m < 10; ++m)
    if (kMonomialExponents[m] == exps) return m;
  return -1;
}

double eval_poly(std::span<const double> coeffs, const ElementFrame& frame, const Vec3& x)
{
  if (coeffs.size() != kNumScalarQuadratics)
    throw InvalidArgument("eval_poly: expected 10 coefficients, got " + std::to_string(coeffs.size()));
  const auto m = quadratic_monomials(frame.to_local(x));
  double v = 0.0;
  for (int i = 0; i < 10; ++i) v += coeffs[i] * m[i];
  return v;
}

Mat3 eval_sym_tensor(std::span<const double> coeffs, const ElementFrame& frame, const Vec3& x)
{
  if (coeffs.size() != kNumTensorQuadratics)
    throw InvalidArgument("eval_sym_tensor: expected 60 coefficients, got " + std::to_string(coeffs.size()));
  const auto m = quadratic_monomials(frame.to_local(x));
  Eigen::Matrix<double, 6, 1> c = Eigen::Matrix<double, 6, 1>::Zero();
  for (int comp = 0; comp < 6; ++comp)
    for (int i = 0; i < 10; ++i) c[comp] += coeffs[comp * 10 + i] * m[i];
  return from_components(c);
}

Vec3 eval_sym_tensor_div(std::span<const double> coeffs, const ElementFrame& frame, const Vec3& x)
{
  if (coeffs.size() != kNumTensorQuadratics)
    throw InvalidArgument("eval_sym_tensor_div: expected 60 coefficients");
  const auto g = quadratic_monomial_gradients(frame.to_local(x));
  Vec3 div = Vec3::Zero();
  for (int comp = 0; comp < 6; ++comp) {
    const auto [i, j] = kSymIndex[comp];
    for (int m = 0; m < 10; ++m) {
      const double c = coeffs[comp * 10 + m];
      div[i] += c * g(j, m);
      if (i != j) div[j] += c * g(i, m);
    }
  }
  return div / frame.h;
}

Vec3 eval_linear_vector(std::span<const double> coeffs, const ElementFrame& frame, const Vec3& x)
{
  if (coeffs.size() != kNumVectorLinears)
    throw InvalidArgument("eval_linear_vector: expected 12 coefficients");
  const Vec3 xi = frame.to_local(x);
  Vec3 v;
  for (int k = 0; k < 3; ++k)
    v[k] = coeffs[4 * k] + coeffs[4 * k + 1] * xi[0] + coeffs[4 * k + 2] * xi[1] + coeffs[4 * k + 3] * xi[2];
  return v;
}

Vec3 bary_to_point(const std::array<double, 4>& bary, std::span<const Vec3> simplex)
{
  Vec3 p = Vec3::Zero();
  for (std::size_t i = 0; i < simplex.size(); ++i) p += bary[i] * simplex[i];
  return p;
}

}  // namespace ncmixed
