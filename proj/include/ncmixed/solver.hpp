#pragma once

#include "ncmixed/assembly.hpp"

#include <string>

namespace ncmixed {

enum class SolverMethod { direct, krylov };

const char* to_string(SolverMethod m);
SolverMethod parse_solver_method(const std::string& s);

struct SolverOptions {
  SolverMethod method = SolverMethod::direct;
  /// Target relative residual ||K z - b|| / ||b||.
  double tol = 1e-10;
  int max_iterations = 50000;
};

struct SolveReport {
  Eigen::VectorXd sigma;
  Eigen::VectorXd u;
  double residual = 0.0;
  SolverMethod method = SolverMethod::direct;
  /// Krylov iterations, or refinement steps after the factorization.
  int iterations = 0;
  /// Nonzeros of the saddle matrix.
  long long nonzeros = 0;
};

/// Solves [[A, B^T], [B, 0]] [sigma; u] = [G; F].
///
/// direct: sparse LU with a fill-reducing ordering, plus iterative refinement.
/// krylov: MINRES preconditioned by diag(A) and diag(B diag(A)^-1 B^T).
/// Throws SolverFailure when the residual target is missed.
SolveReport solve_saddle(const SaddleSystem& sys, const SolverOptions& opts = {});

}  // namespace ncmixed
