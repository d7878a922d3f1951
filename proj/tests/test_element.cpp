#include "ncmixed/element.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>

#include <cmath>
#include <map>
#include <random>

using namespace ncmixed;
using ncmixed::testing::QuadraticTensorField;
using ncmixed::testing::random_sym;
using ncmixed::testing::random_tet;

namespace {

const TetGeometry kReference({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)});

double max_sample_error(const StressShapeBasis& basis, const Eigen::VectorXd& local, const TensorFunction& f)
{
  const Eigen::VectorXd c = basis.combine(local);
  double err = 0.0;
  for (const auto& b : simplex_quadrature(3, 4).points) {
    const Vec3 x = bary_to_point(b, basis.geometry.p);
    err = std::max(err, (eval_sym_tensor({c.data(), 60}, basis.frame, x) - f(x)).norm());
  }
  return err;
}

}  // namespace

TEST(TangentProjector, Properties)
{
  const TangentProjector q(Vec3(1.0, -2.0, 0.5));
  const Mat3 Q = q.matrix();
  EXPECT_LT((Q - Q.transpose()).norm(), 1e-15);
  EXPECT_LT((Q * Q - Q).norm(), 1e-15);
  EXPECT_LT((Q * q.u).norm(), 1e-15);
}

TEST(EdgeNormalPair, OrthonormalAndDeterministic)
{
  const Vec3 s = Vec3(0.3, -0.9, 0.2).normalized();
  const auto [t1, t2] = edge_normal_pair(s);
  EXPECT_NEAR(t1.norm(), 1.0, 1e-15);
  EXPECT_NEAR(t2.norm(), 1.0, 1e-15);
  EXPECT_NEAR(t1.dot(s), 0.0, 1e-15);
  EXPECT_NEAR(t2.dot(s), 0.0, 1e-15);
  EXPECT_NEAR(t1.dot(t2), 0.0, 1e-15);
  // least aligned axis is z here
  EXPECT_LT((t1 - s.cross(Vec3::UnitZ()).normalized()).norm(), 1e-15);
}

TEST(EdgeConstraints, VanishOnLinearFields)
{
  std::mt19937 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const TetGeometry K = random_tet(rng);
    const Eigen::MatrixXd C = edge_constraint_matrix(K);
    ASSERT_EQ(C.rows(), 18);
    ASSERT_EQ(C.cols(), 60);
    Eigen::VectorXd constant = Eigen::VectorXd::Zero(60), linear = Eigen::VectorXd::Zero(60);
    for (int c = 0; c < 6; ++c) {
      constant[10 * c] = std::sin(c + 1.0);
      for (int m = 0; m < 4; ++m) linear[10 * c + m] = std::cos(3.0 * c + m);
    }
    EXPECT_LT(C.cwiseAbs().maxCoeff() > 0 ? (C * constant).cwiseAbs().maxCoeff() : 1.0, 1e-13);
    EXPECT_LT((C * linear).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(EdgeConstraints, RankIsEighteen)
{
  std::mt19937 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd C = edge_constraint_matrix(random_tet(rng));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
    const auto& s = svd.singularValues();
    EXPECT_EQ((s.array() > 1e-10 * s[0]).count(), 18);
  }
}

TEST(EdgeConstraints, RejectsDegenerateTet)
{
  const TetGeometry flat({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)});
  EXPECT_THROW(edge_constraint_matrix(flat), DegenerateGeometry);
  EXPECT_THROW(build_stress_basis(flat, Variant::full), DegenerateGeometry);
  EXPECT_THROW(build_displacement_basis(flat, Variant::full), DegenerateGeometry);
}

TEST(StressDofs, TrivialFields)
{
  const Eigen::VectorXd zero = stress_dofs(kReference, [](const Vec3&) { return Mat3::Zero().eval(); }, Variant::full);
  EXPECT_EQ(zero.size(), 42);
  EXPECT_EQ(zero.cwiseAbs().maxCoeff(), 0.0);

  const Eigen::VectorXd id = stress_dofs(kReference, [](const Vec3&) { return Mat3::Identity().eval(); }, Variant::full);
  const double vol = 1.0 / 6.0;
  const double cell[6] = {vol, 0, 0, vol, 0, vol};
  for (int c = 0; c < 6; ++c) EXPECT_NEAR(id[36 + c], cell[c], 1e-15);
  for (int i = 0; i < 4; ++i) {
    const Vec3 n = kReference.face_normal(i);
    const double area = kReference.face_area(i);
    // integral of a face barycentric over the face: bary_integral((1,0,0)) * area = area / 3
    const double lam = bary_integral({{1, 0, 0}}, area);
    for (int a = 0; a < 3; ++a)
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(id[9 * i + 3 * a + k], lam * n[k], 1e-15);
  }
  EXPECT_EQ(stress_dofs(kReference, [](const Vec3&) { return Mat3::Identity().eval(); }, Variant::reduced).size(), 36);
}

TEST(StressBasis, DimensionsAndDuality)
{
  for (Variant v : {Variant::full, Variant::reduced}) {
    const StressShapeBasis basis = build_stress_basis(kReference, v);
    ASSERT_EQ(basis.size(), num_stress_dofs(v));
    ASSERT_EQ(static_cast<int>(basis.dofs.size()), num_stress_dofs(v));
    for (int j = 0; j < basis.size(); ++j) {
      const Eigen::VectorXd d = stress_dofs(kReference, [&](const Vec3& x) { return basis.value(j, x); }, v, 4, 4);
      for (int i = 0; i < basis.size(); ++i) EXPECT_NEAR(d[i], i == j ? 1.0 : 0.0, 1e-10) << i << "," << j;
    }
  }
  EXPECT_EQ(build_stress_basis(kReference, Variant::full).size(), 42);
  EXPECT_EQ(build_stress_basis(kReference, Variant::reduced).size(), 36);
}

TEST(StressBasis, ReproducesConstantsAndLinears)
{
  std::mt19937 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const TetGeometry K = random_tet(rng);
    for (Variant v : {Variant::full, Variant::reduced}) {
      const StressShapeBasis basis = build_stress_basis(K, v);
      const Mat3 c = random_sym(rng);
      const TensorFunction constant = [&](const Vec3&) { return c; };
      EXPECT_LT(max_sample_error(basis, stress_dofs(K, constant, v), constant), 1e-11);

      const auto lin = QuadraticTensorField::random(rng, 1);
      const TensorFunction linear = [&](const Vec3& x) { return lin(x); };
      EXPECT_LT(max_sample_error(basis, stress_dofs(K, linear, v), linear), 1e-10);
    }
  }
}

TEST(StressBasis, EdgeTraceProperty)
{
  std::mt19937 rng(5);
  const TetGeometry K = random_tet(rng);
  for (Variant v : {Variant::full, Variant::reduced}) {
    const StressShapeBasis basis = build_stress_basis(K, v);
    for (int j = 0; j < basis.size(); ++j) {
      const double scale = basis.coeffs.col(j).cwiseAbs().maxCoeff();
      for (const auto& [a, b] : kTetEdges) {
        const Vec3 pa = K.p[a], pb = K.p[b];
        const auto [t1, t2] = edge_normal_pair(pb - pa);
        const Mat3 d2 = basis.value(j, pa) - 2.0 * basis.value(j, 0.5 * (pa + pb)) + basis.value(j, pb);
        EXPECT_LT(std::abs(t1.dot(d2 * t1)), 1e-12 * scale);
        EXPECT_LT(std::abs(t1.dot(d2 * t2)), 1e-12 * scale);
        EXPECT_LT(std::abs(t2.dot(d2 * t2)), 1e-12 * scale);
      }
    }
  }
}

TEST(StressBasis, ReducedDivergenceIsRigid)
{
  std::mt19937 rng(6);
  const TetGeometry K = random_tet(rng);
  const StressShapeBasis basis = build_stress_basis(K, Variant::reduced);
  const Vec3 x0 = basis.frame.centroid;
  for (int j = 0; j < basis.size(); ++j) {
    // div is linear, so unit differences give its gradient exactly
    Mat3 grad;
    for (int k = 0; k < 3; ++k) grad.col(k) = basis.divergence(j, x0 + Vec3::Unit(k)) - basis.divergence(j, x0);
    const double scale = std::max(1.0, grad.norm() + basis.divergence(j, x0).norm());
    EXPECT_LT((0.5 * (grad + grad.transpose())).norm(), 1e-12 * scale * basis.coeffs.col(j).cwiseAbs().maxCoeff());
  }
}

TEST(StressBasis, DivergenceLiesInDisplacementSpace)
{
  std::mt19937 rng(7);
  const TetGeometry K = random_tet(rng);
  const Eigen::MatrixXd Dv = divergence_matrix(K);
  const StressShapeBasis basis = build_stress_basis(K, Variant::full);
  const ElementFrame frame = K.frame();
  for (int j = 0; j < basis.size(); ++j) {
    const Eigen::VectorXd lin = Dv * basis.coeffs.col(j);
    const Vec3 x = frame.centroid + 0.1 * Vec3(0.3, -0.2, 0.5);
    EXPECT_LT((eval_linear_vector({lin.data(), 12}, frame, x) - basis.divergence(j, x)).norm(),
              1e-12 * std::max(1.0, lin.norm()));
  }
}

TEST(StressBasis, UnisolvenceSweep)
{
  std::mt19937 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const TetGeometry K = random_tet(rng);
    EXPECT_LT(build_stress_basis(K, Variant::full).condition, kMaxDofCondition);
    EXPECT_LT(build_stress_basis(K, Variant::reduced).condition, kMaxDofCondition);
  }
}

TEST(StressBasis, ConditionInvariantUnderRigidMotion)
{
  std::mt19937 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const TetGeometry K = random_tet(rng);
    const Mat3 R = Eigen::AngleAxisd(0.3 + trial, Vec3(1, 2, 3 - trial).normalized()).toRotationMatrix();
    const Vec3 shift(0.5, -1.0, 2.0);
    std::array<Vec3, 4> q;
    for (int a = 0; a < 4; ++a) q[a] = R * K.p[a] + shift;
    const TetGeometry KR(q);
    for (Variant v : {Variant::full, Variant::reduced}) {
      const double c0 = build_stress_basis(K, v).condition;
      const double c1 = build_stress_basis(KR, v).condition;
      EXPECT_NEAR(c1, c0, 1e-8 * c0);
    }
  }
}

TEST(StressBasis, ConditionIsScaleInvariant)
{
  std::array<Vec3, 4> q = kReference.p;
  for (auto& x : q) x *= 1e-3;
  const double c0 = build_stress_basis(kReference, Variant::full).condition;
  EXPECT_NEAR(build_stress_basis(TetGeometry(q), Variant::full).condition, c0, 1e-8 * c0);
}

TEST(StressBasis, NearDegenerateTetFailsUnisolvence)
{
  const TetGeometry sliver({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0.4, 0.4, 1e-9)});
  EXPECT_THROW(build_stress_basis(sliver, Variant::full), Error);
}

TEST(DisplacementBasis, Spaces)
{
  std::mt19937 rng(10);
  const TetGeometry K = random_tet(rng);
  const DisplacementShapeBasis full = build_displacement_basis(K, Variant::full);
  const DisplacementShapeBasis red = build_displacement_basis(K, Variant::reduced);
  EXPECT_EQ(full.size(), 12);
  EXPECT_EQ(red.size(), 6);

  // x -> (x1, 0, 0) = c_x + h xi_x in element coordinates
  Eigen::VectorXd c = Eigen::VectorXd::Zero(12);
  c[0] = full.frame.centroid.x();
  c[1] = full.frame.h;
  const Eigen::VectorXd coeffs = full.coeffs * c;
  for (const auto& b : simplex_quadrature(3, 2).points) {
    const Vec3 x = bary_to_point(b, K.p);
    EXPECT_LT((eval_linear_vector({coeffs.data(), 12}, full.frame, x) - Vec3(x.x(), 0, 0)).norm(), 1e-14);
  }

  const Vec3 x0 = red.frame.centroid;
  for (int j = 0; j < 6; ++j) {
    Mat3 grad;
    for (int k = 0; k < 3; ++k) grad.col(k) = red.value(j, x0 + Vec3::Unit(k)) - red.value(j, x0);
    EXPECT_LT((grad + grad.transpose()).norm(), 1e-14);
  }

  // 6 x 6 Gram matrix of the rigid motions over K
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(6, 6);
  const QuadRule& rule = simplex_quadrature(3, 2);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec3 x = bary_to_point(rule.points[q], K.p);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) G(a, b) += rule.weights[q] * K.volume() * red.value(a, x).dot(red.value(b, x));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  EXPECT_GT(svd.singularValues()[5], 1e-6 * svd.singularValues()[0]);
}

// --- Lemma polynomial -------------------------------------------------------

namespace {

using BaryPoly = std::map<std::array<int, 4>, double>;

// The explicit polynomial written directly in barycentric monomials.
BaryPoly lemma_in_barycentrics(int i, int j, double beta, double gamma)
{
  int k = -1, l = -1;
  for (int m = 0; m < 4; ++m)
    if (m != i && m != j) (k < 0 ? k : l) = m;
  BaryPoly p;
  auto add = [&](double c, int a, int b) {
    std::array<int, 4> e{0, 0, 0, 0};
    ++e[a];
    ++e[b];
    p[e] += c;
  };
  const double s = beta + gamma;
  add(beta, k, k);
  add(s, k, l);
  add(gamma, l, l);
  add(1.5 * s, i, i);
  add(1.5 * s, j, j);
  add(-5 * beta - gamma, i, k);
  add(-5 * beta - gamma, j, k);
  add(-beta - 5 * gamma, i, l);
  add(-beta - 5 * gamma, j, l);
  add(3 * s, i, j);
  return p;
}

double integrate_over_tet(const BaryPoly& p)
{
  double s = 0.0;
  for (const auto& [e, c] : p) s += c * bary_integral({{e[0], e[1], e[2], e[3]}});
  return s;
}

// integral over face f (lambda_f = 0) of p * lambda_m, relative to the face area
double face_moment(const BaryPoly& p, int f, int m)
{
  double s = 0.0;
  for (const auto& [key, c] : p) {
    if (key[f] > 0) continue;
    auto e = key;
    ++e[m];
    std::vector<int> alpha;
    for (int a = 0; a < 4; ++a)
      if (a != f) alpha.push_back(e[a]);
    s += c * bary_integral({alpha});
  }
  return s;
}

}  // namespace

TEST(LemmaPolynomial, BarycentricOracle)
{
  // beta = 1, gamma = 0 for every face pair: conditions (3) and (4) by the
  // closed-form simplex integrals.
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      const BaryPoly p = lemma_in_barycentrics(i, j, 1.0, 0.0);
      EXPECT_NEAR(integrate_over_tet(p), 0.0, 1e-15);
      for (int m = 0; m < 4; ++m) {
        if (m == i) continue;
        EXPECT_NEAR(face_moment(p, i, m), 0.0, 1e-15);
      }
      for (int m = 0; m < 4; ++m) {
        if (m == j) continue;
        EXPECT_NEAR(face_moment(p, j, m), 0.0, 1e-15);
      }
    }
}

TEST(LemmaPolynomial, VertexValues)
{
  std::mt19937 rng(12);
  const TetGeometry K = random_tet(rng);
  const ElementFrame frame = K.frame();
  // i=0, j=1 -> k=2, l=3
  const auto p = lemma_polynomial(K, 0, 1, 1.0, 0.0);
  EXPECT_NEAR(eval_poly(p, frame, K.p[2]), 1.0, 1e-13);
  EXPECT_NEAR(eval_poly(p, frame, K.p[3]), 0.0, 1e-13);
  EXPECT_NEAR(eval_poly(p, frame, K.p[0]), 1.5, 1e-13);
  EXPECT_NEAR(eval_poly(p, frame, K.p[1]), 1.5, 1e-13);

  const auto zero = lemma_polynomial(K, 2, 0, 0.0, 0.0);
  for (double c : zero) EXPECT_EQ(c, 0.0);
}

TEST(LemmaPolynomial, ConditionsHoldOnRandomTets)
{
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> idx(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const TetGeometry K = random_tet(rng);
    int i = idx(rng), j = idx(rng);
    while (j == i) j = idx(rng);
    const LemmaCheck r = check_lemma_polynomial(K, i, j, u(rng), u(rng));
    EXPECT_LT(r.max_residual(), 1e-12);
  }
}

TEST(LemmaPolynomial, RejectsEqualFaces) { EXPECT_THROW(lemma_polynomial(kReference, 1, 1, 1.0, 0.0), InvalidArgument); }

// --- Vertex system --------------------------------------------------------

TEST(VertexSystem, MatchesDisplayedPattern)
{
  // 'a'/'b'/'.' transcription of the 12 x 12 system, rows and columns over
  // lexicographically ordered pairs of distinct indices.
  const char* rows[12] = {".......ba.ba", "....ba....ab", "....ab.ab...", "......b.ab.a",
                          ".ba......a.b", ".ab...a.b...", "...b.a...ba.", "b.a......ab.",
                          "a.ba.b......", "...ba.ba....", "ba....ab....", "ab.ab......."};
  const double a = 0.7, b = -1.3;
  const VertexSystem sys = vertex_system_matrix(a, b);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 12; ++c) {
      const double expected = rows[r][c] == 'a' ? a : rows[r][c] == 'b' ? b : 0.0;
      EXPECT_EQ(sys.matrix(r, c), expected) << r << "," << c;
    }
}

TEST(VertexSystem, Determinant)
{
  EXPECT_NEAR(vertex_system_matrix(3, 2).determinant, 10240000.0, 1e-6);
  EXPECT_EQ(vertex_system_determinant_closed_form(3, 2), 10240000.0);
  EXPECT_NEAR(vertex_system_matrix(1, 2).determinant, 0.0, 1e-10);

  std::mt19937 rng(14);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = u(rng), b = u(rng);
    const double closed = vertex_system_determinant_closed_form(a, b);
    EXPECT_NEAR(vertex_system_matrix(a, b).determinant, closed, 1e-8 * std::abs(closed));
  }
}
