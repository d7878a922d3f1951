#pragma once

#include "ncmixed/element.hpp"

#include <random>
#include <string>
#include <vector>

namespace ncmixed {

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Worst observed value and the bound it is compared against.
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Random positively oriented tet in [-1,1]^3 with diameter / inscribed
/// diameter <= max_ratio. Deterministic for a given engine state.
TetGeometry random_shape_regular_tet(std::mt19937_64& rng, double max_ratio = 10.0);

/// Dof-matrix condition numbers of both variants on random shape-regular tets.
CheckResult check_unisolvence(int count, unsigned seed);
/// Numeric 12x12 determinant against 16 (2a-b)^2 b^6 (a+b)^4, plus the (3,2) and (b/2,b) values.
CheckResult check_vertex_determinant(int count, unsigned seed);
/// Conditions on the explicit edge polynomial for random (K, i, j, beta, gamma).
CheckResult check_lemma(int count, unsigned seed);
/// Normal-normal jumps and tangential jump moments of every global stress basis function.
CheckResult check_jumps(int n);
/// div_h Pi_h tau = P_h div tau for random global quadratic tau, both variants.
CheckResult check_commutativity(int n, int count, unsigned seed);
/// Constant stress from linear boundary displacement, full variant.
CheckResult check_patch_test(int n);
/// E_h(w, tau) for continuous piecewise linear w vanishing on the boundary.
CheckResult check_consistency_on_wh(int n, int count, unsigned seed);

/// The property suite behind the `verify` subcommand.
std::vector<CheckResult> run_verification(unsigned seed = 20240601);

struct ElementReport {
  TetGeometry geometry;
  double volume = 0.0;
  double shape_ratio = 0.0;
  int dim_full = 0;
  int dim_reduced = 0;
  double condition_full = 0.0;
  double condition_reduced = 0.0;
  double duality_error = 0.0;
  double lemma_residual = 0.0;
  double determinant_numeric = 0.0;
  double determinant_closed_form = 0.0;
  bool determinant_ok = false;
  bool passed() const;
};

/// Element-level checks on one tet. Throws DegenerateGeometry for flat tets.
ElementReport element_report(const TetGeometry& K);

}  // namespace ncmixed
