#include "ncmixed/verify.hpp"

#include "ncmixed/fields.hpp"
#include "ncmixed/solver.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace ncmixed {

namespace {

Mat3 random_sym(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) m(i, j) = m(j, i) = u(rng);
  return m;
}

CheckResult make(std::string name, double value, double threshold, std::string detail = {})
{
  return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

// Global quadratic tensor field sum_m c_m x^m over the 10 quadratic monomials.
struct QuadraticField {
  std::array<Mat3, 10> c;
  Mat3 value(const Vec3& x) const
  {
    const auto m = quadratic_monomials(x);
    Mat3 v = Mat3::Zero();
    for (int i = 0; i < 10; ++i) v += m[i] * c[i];
    return v;
  }
  Vec3 divergence(const Vec3& x) const
  {
    const auto g = quadratic_monomial_gradients(x);
    Vec3 d = Vec3::Zero();
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 3; ++j) d += g(j, i) * c[i].col(j);
    return d;
  }
  /// Max entry size over the unit cube, bounded by the coefficient sum.
  double scale() const
  {
    double s = 0.0;
    for (const Mat3& m : c) s += m.cwiseAbs().maxCoeff();
    return s;
  }
};

}  // namespace

TetGeometry random_shape_regular_tet(std::mt19937_64& rng, double max_ratio)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    std::array<Vec3, 4> p;
    for (auto& v : p) v = Vec3(u(rng), u(rng), u(rng));
    const double vol = signed_volume(p[0], p[1], p[2], p[3]);
    if (vol == 0.0) continue;
    if (vol < 0) std::swap(p[2], p[3]);
    if (tet_diameter(p) / inscribed_diameter(p) <= max_ratio) return TetGeometry(p);
  }
}

CheckResult check_unisolvence(int count, unsigned seed)
{
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < count; ++k) {
    const TetGeometry K = random_shape_regular_tet(rng);
    for (Variant v : {Variant::full, Variant::reduced}) {
      try {
        const StressShapeBasis b = build_stress_basis(K, v);
        if (b.size() != num_stress_dofs(v)) ++failures;
        worst = std::max(worst, b.condition);
      } catch (const UnisolvenceFailure& e) {
        ++failures;
        worst = std::max(worst, e.condition());
      }
    }
  }
  std::ostringstream d;
  d << count << " tets, 42 and 36 dofs, " << failures << " failures";
  CheckResult r = make("unisolvence", worst, kMaxDofCondition, d.str());
  r.passed = r.passed && worst < kMaxDofCondition && failures == 0;
  return r;
}

CheckResult check_vertex_determinant(int count, unsigned seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const double a = u(rng), b = u(rng);
    const double closed = vertex_system_determinant_closed_form(a, b);
    const double numeric = vertex_system_matrix(a, b).determinant;
    worst = std::max(worst, std::abs(numeric - closed) / std::abs(closed));
  }
  const double d32 = vertex_system_matrix(3.0, 2.0).determinant;
  const double d_half = vertex_system_matrix(0.75, 1.5).determinant;
  const bool special = std::abs(d32 - 10240000.0) <= 1e-8 * 10240000.0 && std::abs(d_half) <= 1e-9;
  std::ostringstream d;
  d.precision(12);
  d << count << " samples; det(3,2) = " << d32 << "; det(0.75,1.5) = " << d_half;
  CheckResult r = make("vertex-determinant", worst, 1e-8, d.str());
  r.passed = r.passed && special;
  return r;
}

CheckResult check_lemma(int count, unsigned seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> idx(0, 3);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const TetGeometry K = random_shape_regular_tet(rng);
    const int i = idx(rng);
    int j = idx(rng);
    while (j == i) j = idx(rng);
    const double beta = u(rng), gamma = u(rng);
    worst = std::max(worst, check_lemma_polynomial(K, i, j, beta, gamma).max_residual());
  }
  return make("edge-polynomial", worst, 1e-12, std::to_string(count) + " random cases");
}

CheckResult check_jumps(int n)
{
  const TetMesh m = build_box_mesh(n);
  const QuadRule& rule = simplex_quadrature(2, 8);
  double worst_nn = 0.0, worst_moment = 0.0;
  for (Variant v : {Variant::full, Variant::reduced}) {
    const MixedSpace space(m, v);
    const DofMap& dm = space.dofs();
    for (int f = 0; f < m.num_faces(); ++f) {
      const Face& face = m.faces()[f];
      if (face.boundary) continue;
      const auto P = m.face_points(f);
      std::map<int, std::array<int, 2>> support;
      for (int s = 0; s < 2; ++s) {
        const auto idx = dm.stress_indices(face.tets[s]);
        for (std::size_t k = 0; k < idx.size(); ++k)
          support.try_emplace(idx[k], std::array<int, 2>{-1, -1}).first->second[s] = static_cast<int>(k);
      }
      for (const auto& [g, loc] : support) {
        Eigen::Matrix<double, 9, 1> mom = Eigen::Matrix<double, 9, 1>::Zero();
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const Vec3 x = bary_to_point(rule.points[q], P);
          Vec3 jump = Vec3::Zero();
          for (int s = 0; s < 2; ++s)
            if (loc[s] >= 0) jump += (s == 0 ? 1.0 : -1.0) * (space.stress_basis(face.tets[s]).value(loc[s], x) * face.normal);
          worst_nn = std::max(worst_nn, std::abs(face.normal.dot(jump)));
          for (int c = 0; c < 3; ++c) mom.segment<3>(3 * c) += face.area * rule.weights[q] * rule.points[q][c] * jump;
        }
        worst_moment = std::max(worst_moment, mom.cwiseAbs().maxCoeff());
      }
    }
  }
  std::ostringstream d;
  d << "n=" << n << ", both variants; max normal-normal jump " << worst_nn << ", max P1 moment " << worst_moment;
  return make("face-jumps", std::max(worst_nn, worst_moment), 1e-10, d.str());
}

CheckResult check_commutativity(int n, int count, unsigned seed)
{
  std::mt19937_64 rng(seed);
  const TetMesh m = build_box_mesh(n);
  double worst = 0.0;
  for (Variant v : {Variant::full, Variant::reduced}) {
    const MixedSpace space(m, v);
    for (int k = 0; k < count; ++k) {
      QuadraticField f;
      for (Mat3& c : f.c) c = random_sym(rng);
      const double r = commutativity_residual(
          space, [&](const Vec3& x) { return f.value(x); }, [&](const Vec3& x) { return f.divergence(x); });
      worst = std::max(worst, r / f.scale());
    }
  }
  return make("commuting-diagram", worst, 1e-10,
              "n=" + std::to_string(n) + ", " + std::to_string(count) + " fields per variant, relative to field scale");
}

CheckResult check_patch_test(int n)
{
  Mat3 M;
  M << 1.0, 0.5, -0.25, 0.5, -0.75, 0.2, -0.25, 0.2, 0.5;
  const IsotropicCompliance c(1.3, 0.8);
  const Mat3 sigma = stiffness_apply(c, M);
  const TetMesh mesh = build_box_mesh(n);
  const MixedSpace space(mesh, Variant::full);
  const SaddleSystem sys = assemble_system(space, c, nullptr, [&](const Vec3& x) { return Vec3(M * x); });
  const SolveReport sol = solve_saddle(sys);
  const DiscreteStressField sh(space, sol.sigma);
  // The unit cube has measure 1, so ||sigma||_0 = |sigma|.
  const double rel = stress_error(sh, [&](const Vec3&) { return sigma; }, 4) / sigma.norm();
  return make("patch-test n=" + std::to_string(n), rel, 1e-9, "relative L2 stress error");
}

CheckResult check_consistency_on_wh(int n, int count, unsigned seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const TetMesh m = build_box_mesh(n);
  const auto on_boundary = ContinuousLinearField::boundary_vertices(m);
  double worst = 0.0;
  for (Variant v : {Variant::full, Variant::reduced}) {
    const MixedSpace space(m, v);
    for (int k = 0; k < count; ++k) {
      std::vector<Vec3> nodal(m.num_vertices(), Vec3::Zero());
      for (int i = 0; i < m.num_vertices(); ++i)
        if (!on_boundary[i]) nodal[i] = Vec3(u(rng), u(rng), u(rng));
      const ContinuousLinearField w(m, nodal);
      const DiscreteStressField tau(space, Eigen::VectorXd::NullaryExpr(space.dofs().num_stress(), [&] { return u(rng); }));
      worst = std::max(worst, std::abs(consistency_error(w, tau)));
    }
  }
  return make("consistency-on-continuous-linears", worst, 1e-10,
              "n=" + std::to_string(n) + ", " + std::to_string(count) + " pairs per variant");
}

std::vector<CheckResult> run_verification(unsigned seed)
{
  return {check_unisolvence(100, seed),        check_vertex_determinant(1000, seed + 1),
          check_lemma(50, seed + 2),           check_jumps(2),
          check_commutativity(2, 20, seed + 3), check_patch_test(1),
          check_patch_test(2),                 check_consistency_on_wh(2, 20, seed + 4)};
}

bool ElementReport::passed() const
{
  return dim_full == 42 && dim_reduced == 36 && condition_full < kMaxDofCondition &&
         condition_reduced < kMaxDofCondition && duality_error <= 1e-10 && lemma_residual <= 1e-12 && determinant_ok;
}

ElementReport element_report(const TetGeometry& K)
{
  ElementReport r;
  r.geometry = K;
  r.volume = K.volume();
  r.shape_ratio = tet_diameter(K.p) / inscribed_diameter(K.p);
  const StressShapeBasis full = build_stress_basis(K, Variant::full);
  const StressShapeBasis reduced = build_stress_basis(K, Variant::reduced);
  r.dim_full = full.size();
  r.dim_reduced = reduced.size();
  r.condition_full = full.condition;
  r.condition_reduced = reduced.condition;
  for (const StressShapeBasis* b : {&full, &reduced}) {
    const Eigen::MatrixXd D = dof_matrix_on_monomials(K, b->variant) * b->coeffs;
    r.duality_error = std::max(r.duality_error, (D - Eigen::MatrixXd::Identity(D.rows(), D.cols())).cwiseAbs().maxCoeff());
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j)
        for (auto [beta, gamma] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}, std::pair{0.7, -1.3}})
          r.lemma_residual = std::max(r.lemma_residual, check_lemma_polynomial(K, i, j, beta, gamma).max_residual());
  r.determinant_numeric = vertex_system_matrix(3.0, 2.0).determinant;
  r.determinant_closed_form = vertex_system_determinant_closed_form(3.0, 2.0);
  r.determinant_ok = std::abs(r.determinant_numeric - r.determinant_closed_form) <= 1e-8 * r.determinant_closed_form &&
                     r.determinant_closed_form == 10240000.0;
  return r;
}

}  // namespace ncmixed
