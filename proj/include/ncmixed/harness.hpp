#pragma once

#include "ncmixed/fields.hpp"
#include "ncmixed/solver.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace ncmixed {

/// Closed-form elasticity solution on the unit cube: sigma = 2 mu eps(u) +
/// lambda tr(eps(u)) I and f = div sigma, with boundary data g = u.
struct ManufacturedSolution {
  std::string name;
  double lambda = 1.0;
  double mu = 1.0;
  VectorFunction u;
  GradientFunction grad_u;  // (i, j) = d u_i / d x_j
  TensorFunction sigma;
  VectorFunction f;
};

/// Cases: "sine" (u = sin(pi x) sin(pi y) sin(pi z) (1,1,1)), "poly3"
/// (component-wise cubic, nonzero on the boundary), "linear" (u = M x with M
/// constant symmetric). Throws InvalidArgument for other names.
ManufacturedSolution manufactured(const std::string& case_name, double lambda, double mu);

std::vector<std::string> manufactured_cases();

/// Largest |f - div sigma| over the sample points, with div sigma from central
/// differences of step h, relative to max(1, |f|).
double divergence_mismatch(const ManufacturedSolution& ms, const std::vector<Vec3>& points, double h = 1e-5);

struct LevelResult {
  int level = 0;
  int n = 0;
  double h = 0.0;
  int n_sigma = 0;
  int n_u = 0;
  double err_sigma = 0.0;
  double err_div = 0.0;
  double err_u = 0.0;
  /// ||f - P_h f||_0, which err_div must equal.
  double div_projection_error = 0.0;
  /// |E_h(u, Pi_h sigma)| over interior faces.
  double consistency_error = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double max_condition = 0.0;
  double wall_time = 0.0;
};

/// Observed orders log(e_k / e_{k+1}) / log(h_k / h_{k+1}) between consecutive levels.
struct RateRow {
  int from_n = 0;
  int to_n = 0;
  double sigma = 0.0;
  double div = 0.0;
  double u = 0.0;
  double consistency = 0.0;
};

struct ConvergenceReport {
  std::string case_name;
  Variant variant = Variant::full;
  double lambda = 1.0;
  double mu = 1.0;
  std::string solver;
  double tol = 0.0;
  bool complete = true;
  std::string failure;
  std::vector<LevelResult> levels;
  std::vector<RateRow> rates;
};

void compute_rates(ConvergenceReport& report);

/// Everything built while solving one level, for dumps and sampling.
struct LevelArtifacts {
  std::unique_ptr<TetMesh> mesh;
  std::unique_ptr<MixedSpace> space;
  SaddleSystem system;
  std::unique_ptr<DiscreteStressField> sigma_h;
  std::unique_ptr<DiscreteDisplacementField> u_h;
};

/// Mesh, assemble, solve and measure on the n x n x n Kuhn mesh of the unit cube.
LevelResult run_level(const ManufacturedSolution& ms, Variant v, int n, const SolverOptions& opts,
                      LevelArtifacts* keep = nullptr);

/// Thrown when a level fails to solve; carries the levels finished so far.
class StudyFailure : public SolverFailure {
 public:
  StudyFailure(const std::string& what, double residual, ConvergenceReport partial)
      : SolverFailure(what, residual), partial_(std::make_shared<ConvergenceReport>(std::move(partial)))
  {
  }
  const ConvergenceReport& partial() const { return *partial_; }

 private:
  std::shared_ptr<ConvergenceReport> partial_;
};

/// Runs each level in order. Levels must be positive and strictly increasing.
ConvergenceReport run_convergence(const std::string& case_name, Variant v, const std::vector<int>& levels,
                                  double lambda, double mu, const SolverOptions& opts = {});

/// JSON text with sorted keys; all fields except wall_time are deterministic.
std::string report_to_json(const ConvergenceReport& report, int indent = 2);
ConvergenceReport report_from_json(const std::string& text);

/// Columns: level,n,h,n_sigma,n_u,err_sigma,err_div,err_u,rate_sigma,rate_div,rate_u.
/// Rates are empty on the first level.
void write_report_csv(std::ostream& os, const ConvergenceReport& report);

}  // namespace ncmixed
