#include "ncmixed/assembly.hpp"
#include "ncmixed/solver.hpp"

#include "test_support.hpp"

#include <Eigen/SparseCholesky>
#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>

using namespace ncmixed;
using ncmixed::testing::random_sym;

namespace {

TetMesh single_tet()
{
  return TetMesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}, {{0, 1, 2, 3}});
}

Mat3 stress_at(const MixedSpace& space, const Eigen::VectorXd& sigma, int t, const Vec3& x)
{
  const auto idx = space.dofs().stress_indices(t);
  Eigen::VectorXd local(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) local[k] = sigma[idx[k]];
  const Eigen::VectorXd c = space.stress_basis(t).combine(local);
  return eval_sym_tensor(std::span<const double>(c.data(), c.size()), space.stress_basis(t).frame, x);
}

Vec3 displacement_at(const MixedSpace& space, const Eigen::VectorXd& u, int t, const Vec3& x)
{
  const auto idx = space.dofs().displacement_indices(t);
  const DisplacementShapeBasis& db = space.displacement_basis(t);
  Vec3 v = Vec3::Zero();
  for (std::size_t k = 0; k < idx.size(); ++k) v += u[idx[k]] * db.value(static_cast<int>(k), x);
  return v;
}

}  // namespace

TEST(DofMap, CountsOnUnitCube)
{
  const TetMesh m = build_box_mesh(1);
  const DofMap full(m, Variant::full), reduced(m, Variant::reduced);
  EXPECT_EQ(full.num_stress(), 198);
  EXPECT_EQ(full.num_displacement(), 72);
  EXPECT_EQ(reduced.num_stress(), 162);
  EXPECT_EQ(reduced.num_displacement(), 36);
  EXPECT_EQ(reduced.cell_offset(0), -1);
}

TEST(DofMap, SingleTet)
{
  const TetMesh m = single_tet();
  const DofMap d(m, Variant::full);
  EXPECT_EQ(d.num_stress(), 42);
  EXPECT_EQ(d.num_displacement(), 12);
}

TEST(DofMap, SharedFacesShareIndices)
{
  const TetMesh m = build_box_mesh(2);
  for (Variant v : {Variant::full, Variant::reduced}) {
    const DofMap d(m, v);
    EXPECT_EQ(d.num_stress(), 9 * m.num_faces() + (v == Variant::full ? 6 * m.num_tets() : 0));
    std::vector<int> hits(d.num_stress(), 0);
    for (int t = 0; t < m.num_tets(); ++t)
      for (int g : d.stress_indices(t)) ++hits[g];
    for (int f = 0; f < m.num_faces(); ++f) {
      const Face& face = m.faces()[f];
      for (int k = 0; k < 9; ++k) EXPECT_EQ(hits[9 * f + k], face.boundary ? 1 : 2);
      if (face.boundary) continue;
      const int a = face.tets[0], b = face.tets[1];
      int ia = -1, ib = -1;
      for (int i = 0; i < 4; ++i) {
        if (m.tet_face(a, i) == f) ia = i;
        if (m.tet_face(b, i) == f) ib = i;
      }
      ASSERT_GE(ia, 0);
      ASSERT_GE(ib, 0);
      for (int k = 0; k < 9; ++k) EXPECT_EQ(d.stress_indices(a)[9 * ia + k], d.stress_indices(b)[9 * ib + k]);
    }
  }
}

TEST(Compliance, Examples)
{
  std::mt19937 rng(3);
  const Mat3 tau = random_sym(rng);
  EXPECT_LT((compliance_apply(IsotropicCompliance(0.0, 0.5), tau) - tau).norm(), 1e-15);
  for (auto [l, m] : {std::pair{1.0, 1.0}, std::pair{3.0, 0.25}, std::pair{0.0, 2.0}}) {
    const IsotropicCompliance c(l, m);
    EXPECT_LT((compliance_apply(c, Mat3::Identity()) - Mat3::Identity() / (3 * l + 2 * m)).norm(), 1e-15);
  }
  EXPECT_THROW(IsotropicCompliance(1.0, 0.0), InvalidArgument);
  EXPECT_THROW(IsotropicCompliance(-1.0, 1.0), InvalidArgument);
  IsotropicCompliance bad;
  bad.mu = -1.0;
  EXPECT_THROW(compliance_apply(bad, tau), InvalidArgument);
}

TEST(Compliance, InverseRoundTrip)
{
  std::mt19937 rng(5);
  const IsotropicCompliance c(2.3, 0.7);
  for (int k = 0; k < 100; ++k) {
    const Mat3 eps = random_sym(rng);
    EXPECT_LT((compliance_apply(c, stiffness_apply(c, eps)) - eps).norm(), 1e-14);
  }
}

TEST(Compliance, ComponentMatrixAndSpectrum)
{
  std::mt19937 rng(9);
  const double l = 1.5, m = 0.4;
  const IsotropicCompliance c(l, m);
  const auto C = c.component_matrix();
  for (int k = 0; k < 20; ++k) {
    const Mat3 s = random_sym(rng), t = random_sym(rng);
    const double direct = (compliance_apply(c, s).array() * t.array()).sum();
    EXPECT_NEAR(to_components(s).dot(C * to_components(t)), direct, 1e-14);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(c.orthonormal_matrix());
  const auto ev = es.eigenvalues();
  EXPECT_NEAR(ev[0], 1.0 / (2 * m + 3 * l), 1e-14);
  for (int k = 1; k < 6; ++k) EXPECT_NEAR(ev[k], 1.0 / (2 * m), 1e-14);
}

TEST(Assembly, StructureAndCholesky)
{
  const TetMesh m = build_box_mesh(2);
  for (Variant v : {Variant::full, Variant::reduced}) {
    const MixedSpace space(m, v);
    const SaddleSystem sys = assemble_system(space, IsotropicCompliance(1.0, 1.0), nullptr, nullptr);
    EXPECT_EQ(sys.num_stress(), space.dofs().num_stress());
    EXPECT_EQ(sys.num_displacement(), space.dofs().num_displacement());
    const Eigen::SparseMatrix<double> At = sys.A.transpose();
    EXPECT_LT((sys.A - At).norm(), 1e-14 * sys.A.norm());
    const Eigen::SparseMatrix<double> K = sys.matrix();
    const Eigen::SparseMatrix<double> Kt = K.transpose();
    EXPECT_LT((K - Kt).norm(), 1e-14 * K.norm());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.A);
    EXPECT_EQ(llt.info(), Eigen::Success);
  }
}

TEST(Assembly, ZeroDataGivesZeroSolution)
{
  const TetMesh m = build_box_mesh(2);
  const MixedSpace space(m, Variant::full);
  const SaddleSystem sys = assemble_system(space, IsotropicCompliance(1.0, 1.0), nullptr,
                                           [](const Vec3&) { return Vec3::Zero(); });
  const SolveReport r = solve_saddle(sys);
  EXPECT_EQ(r.sigma.norm(), 0.0);
  EXPECT_EQ(r.u.norm(), 0.0);
}

TEST(Assembly, LoadVectorMatchesDisplacementMoments)
{
  // Pairing F with the coefficients of the constant field e_x gives the integral of f_x.
  const TetMesh m = build_box_mesh(2);
  const MixedSpace space(m, Variant::full);
  const Vec3 f(1.0, -2.0, 0.5);
  const SaddleSystem sys = assemble_system(space, IsotropicCompliance(), [&](const Vec3&) { return f; }, nullptr);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(sys.num_displacement());
  for (int t = 0; t < m.num_tets(); ++t) {
    const auto& db = space.displacement_basis(t);
    Eigen::VectorXd target = Eigen::VectorXd::Zero(12);
    target[0] = 1.0;
    const Eigen::VectorXd c = db.coeffs.colPivHouseholderQr().solve(target);
    const auto idx = space.dofs().displacement_indices(t);
    for (int k = 0; k < db.size(); ++k) w[idx[k]] = c[k];
  }
  EXPECT_NEAR(w.dot(sys.F), f[0], 1e-13);
}

class PatchTest : public ::testing::TestWithParam<std::tuple<int, Variant>> {};

TEST_P(PatchTest, ReproducesConstantStress)
{
  const auto [n, v] = GetParam();
  Mat3 M;
  M << 1.0, 0.5, -0.25, 0.5, -0.75, 0.2, -0.25, 0.2, 0.5;
  const IsotropicCompliance c(1.3, 0.8);
  const Mat3 sigma = stiffness_apply(c, M);
  const TetMesh mesh = build_box_mesh(n);
  const MixedSpace space(mesh, v);
  const SaddleSystem sys = assemble_system(space, c, nullptr, [&](const Vec3& x) { return Vec3(M * x); });
  const SolveReport r = solve_saddle(sys);
  EXPECT_LE(r.residual, 1e-10);
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto p = mesh.tet_points(t);
    for (const Vec3& x : {Vec3(0.25 * (p[0] + p[1] + p[2] + p[3])), Vec3(0.6 * p[0] + 0.3 * p[1] + 0.1 * p[3])}) {
      EXPECT_LT((stress_at(space, r.sigma, t, x) - sigma).norm(), 1e-9 * sigma.norm());
      if (v == Variant::full) EXPECT_LT((displacement_at(space, r.u, t, x) - M * x).norm(), 1e-9);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Meshes, PatchTest,
                         ::testing::Values(std::tuple{1, Variant::full}, std::tuple{2, Variant::full},
                                           std::tuple{1, Variant::reduced}, std::tuple{2, Variant::reduced}));

TEST(Assembly, SharedFaceDofsAgreeFromBothSides)
{
  std::mt19937 rng(21);
  const auto field = ncmixed::testing::QuadraticTensorField::random(rng);
  const TetMesh m = build_box_mesh(2, Vec3(1.0, 0.8, 1.2));
  for (int f = 0; f < m.num_faces(); ++f) {
    const Face& face = m.faces()[f];
    if (face.boundary) continue;
    std::array<Eigen::VectorXd, 2> vals;
    for (int s = 0; s < 2; ++s) {
      const int t = face.tets[s];
      const Eigen::VectorXd d = stress_dofs(TetGeometry::from_mesh(m, t), field, Variant::full);
      for (int i = 0; i < 4; ++i)
        if (m.tet_face(t, i) == f) vals[s] = d.segment(9 * i, 9);
    }
    EXPECT_LT((vals[0] - vals[1]).norm(), 1e-14 * (1.0 + vals[0].norm())) << "face " << f;
  }
}

TEST(Assembly, SystemDumpFormat)
{
  const TetMesh m = build_box_mesh(1);
  const MixedSpace space(m, Variant::reduced);
  const SaddleSystem sys = assemble_system(space, IsotropicCompliance(), [](const Vec3&) { return Vec3(1, 0, 0); },
                                           nullptr);
  std::stringstream ss;
  write_system(ss, sys);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "%%MatrixMarket matrix coordinate real general");
  std::getline(ss, line);
  EXPECT_EQ(line[0], '%');
  long rows, cols, nnz;
  ss >> rows >> cols >> nnz;
  EXPECT_EQ(rows, 198);
  EXPECT_EQ(cols, 198);
  const Eigen::SparseMatrix<double> K = sys.matrix();
  Eigen::SparseMatrix<double> R(rows, cols);
  std::vector<Eigen::Triplet<double>> trips;
  for (long k = 0; k < nnz; ++k) {
    long i, j;
    double val;
    ss >> i >> j >> val;
    trips.emplace_back(i - 1, j - 1, val);
  }
  R.setFromTriplets(trips.begin(), trips.end());
  EXPECT_EQ((R - K).norm(), 0.0);
  std::getline(ss, line);
  std::getline(ss, line);
  EXPECT_EQ(line, "%%MatrixMarket matrix array real general");
}
