#include "ncmixed/polyquad.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

using namespace ncmixed;

namespace {

// Gauss-Legendre nodes on [0,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Iterated integral over the reference simplex of measure 1/d!, rescaled to measure 1.
double iterated_integral(int d, const std::function<double(const std::vector<double>&)>& f)
{
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  double total = 0.0;
  if (d == 2) {
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double a = x[i], b = (1 - a) * x[j];
        total += w[i] * w[j] * (1 - a) * f({1 - a - b, a, b});
      }
    return 2.0 * total;
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double a = x[i], b = (1 - a) * x[j], c = (1 - a - b) * x[k];
        total += w[i] * w[j] * w[k] * (1 - a) * (1 - a - b) * f({1 - a - b - c, a, b, c});
      }
  return 6.0 * total;
}

double bary_power(const std::vector<double>& lam, const std::vector<int>& alpha)
{
  double v = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) v *= std::pow(lam[i], alpha[i]);
  return v;
}

// All multi-indices of length n with total degree deg.
void multi_indices(int n, int deg, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
  if (static_cast<int>(cur.size()) == n - 1) {
    cur.push_back(deg);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = 0; a <= deg; ++a) {
    cur.push_back(a);
    multi_indices(n, deg - a, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> multi_indices(int n, int deg)
{
  std::vector<int> cur;
  std::vector<std::vector<int>> out;
  multi_indices(n, deg, cur, out);
  return out;
}

double apply_rule(const QuadRule& r, const std::vector<int>& alpha)
{
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    double v = r.weights[q];
    for (std::size_t i = 0; i < alpha.size(); ++i) v *= std::pow(r.points[q][i], alpha[i]);
    s += v;
  }
  return s;
}

}  // namespace

TEST(BaryIntegral, KnownValues)
{
  EXPECT_DOUBLE_EQ(bary_integral({{0, 0, 0, 0}}), 1.0);
  EXPECT_NEAR(bary_integral({{1, 1, 0, 0}}), 1.0 / 20.0, 1e-16);
  EXPECT_NEAR(bary_integral({{2, 0, 0, 0}}), 1.0 / 10.0, 1e-16);
  EXPECT_NEAR(bary_integral({{2, 0, 0, 0}}, 3.0), 3.0 / 10.0, 1e-15);
  EXPECT_THROW(bary_integral({{-1, 0, 0, 0}}), InvalidArgument);
}

TEST(BaryIntegral, MatchesIteratedIntegration)
{
  for (int d : {2, 3})
    for (int deg = 0; deg <= 6; ++deg)
      for (const auto& alpha : multi_indices(d + 1, deg)) {
        const double oracle = iterated_integral(d, [&](const std::vector<double>& l) { return bary_power(l, alpha); });
        EXPECT_NEAR(bary_integral({alpha}), oracle, 1e-14 * oracle) << "d=" << d << " deg=" << deg;
      }
}

TEST(BaryIntegral, SymmetricUnderPermutation)
{
  std::vector<int> alpha{3, 1, 0, 2};
  const double ref = bary_integral({alpha});
  std::sort(alpha.begin(), alpha.end());
  do {
    EXPECT_DOUBLE_EQ(bary_integral({alpha}), ref);
  } while (std::next_permutation(alpha.begin(), alpha.end()));
}

TEST(BaryIntegral, HighDegreeDoesNotOverflow)
{
  // 10! 3! / 13! = 6 / (11 * 12 * 13)
  EXPECT_NEAR(bary_integral({{10, 0, 0, 0}}), 6.0 / (11.0 * 12.0 * 13.0), 1e-16);
}

TEST(SimplexQuadrature, CentroidRule)
{
  const QuadRule& r = simplex_quadrature(3, 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-15);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.points[0][i], 0.25, 1e-15);
}

TEST(SimplexQuadrature, ExactnessSweep)
{
  for (int d : {2, 3})
    for (int requested : {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}) {
      const QuadRule& r = simplex_quadrature(d, requested);
      EXPECT_GE(r.exact_degree, requested);
      double wsum = 0.0;
      for (double w : r.weights) wsum += w;
      EXPECT_NEAR(wsum, 1.0, 1e-14);
      for (int deg = 0; deg <= r.exact_degree; ++deg)
        for (const auto& alpha : multi_indices(d + 1, deg)) {
          const double exact = bary_integral({alpha});
          EXPECT_NEAR(apply_rule(r, alpha), exact, 1e-13 * exact) << "d=" << d << " rule " << r.exact_degree;
        }
    }
}

TEST(SimplexQuadrature, QuarticSweeps)
{
  EXPECT_EQ(multi_indices(3, 4).size(), 15u);
  for (const auto& alpha : multi_indices(3, 4))
    EXPECT_NEAR(apply_rule(simplex_quadrature(2, 4), alpha), bary_integral({alpha}), 1e-13 * bary_integral({alpha}));
  for (const auto& alpha : multi_indices(4, 4))
    EXPECT_NEAR(apply_rule(simplex_quadrature(3, 4), alpha), bary_integral({alpha}), 1e-13 * bary_integral({alpha}));
}

TEST(SimplexQuadrature, Errors)
{
  EXPECT_THROW(simplex_quadrature(3, 11), UnsupportedDegree);
  EXPECT_THROW(simplex_quadrature(4, 2), InvalidArgument);
}

TEST(EvalPoly, TrivialValues)
{
  const ElementFrame frame{Vec3(0.2, 0.1, -0.3), 0.7};
  std::array<double, 10> c{};
  EXPECT_EQ(eval_poly(c, frame, Vec3(1, 2, 3)), 0.0);
  c[0] = 1.0;
  EXPECT_EQ(eval_poly(c, frame, Vec3(1, 2, 3)), 1.0);
  std::array<double, 60> t{};
  t[0] = t[30] = t[50] = 1.0;
  EXPECT_LT((eval_sym_tensor(t, frame, Vec3(4, 5, 6)) - Mat3::Identity()).norm(), 1e-15);
  const std::vector<double> bad(9, 0.0);
  EXPECT_THROW(eval_poly(bad, frame, Vec3::Zero()), InvalidArgument);
  EXPECT_THROW(eval_sym_tensor(bad, frame, Vec3::Zero()), InvalidArgument);
}

TEST(EvalPoly, MatchesDirectMonomialSum)
{
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::array<Vec3, 4> tet{Vec3::Random(), Vec3::Random(), Vec3::Random(), Vec3::Random()};
    const ElementFrame frame = make_frame(tet);
    std::array<double, 10> c;
    for (double& v : c) v = u(rng);
    const Vec3 x = frame.centroid + 0.1 * Vec3::Random();
    const Vec3 s = (x - frame.centroid) / frame.h;
    const double oracle = c[0] + c[1] * s.x() + c[2] * s.y() + c[3] * s.z() + c[4] * s.x() * s.x() +
                          c[5] * s.x() * s.y() + c[6] * s.x() * s.z() + c[7] * s.y() * s.y() + c[8] * s.y() * s.z() +
                          c[9] * s.z() * s.z();
    EXPECT_NEAR(eval_poly(c, frame, x), oracle, 1e-14);
    EXPECT_NEAR(eval_poly(c, frame, frame.centroid), c[0], 1e-14);
  }
}

TEST(EvalPoly, DivergenceMatchesFiniteDifferences)
{
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ElementFrame frame{Vec3(0.3, 0.2, 0.1), 0.5};
  std::array<double, 60> c;
  for (double& v : c) v = u(rng);
  const Vec3 x(0.4, 0.1, 0.3);
  Vec3 fd = Vec3::Zero();
  const double h = 1e-5;
  for (int j = 0; j < 3; ++j) {
    const Vec3 dx = h * Vec3::Unit(j);
    const Mat3 d = (eval_sym_tensor(c, frame, x + dx) - eval_sym_tensor(c, frame, x - dx)) / (2 * h);
    fd += d.col(j);
  }
  EXPECT_LT((eval_sym_tensor_div(c, frame, x) - fd).norm(), 1e-8);
}
