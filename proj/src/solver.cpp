#include "ncmixed/solver.hpp"

#include <Eigen/SparseLU>
#ifdef NCMIXED_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <cmath>
#include <string>

namespace ncmixed {

const char* to_string(SolverMethod m) { return m == SolverMethod::direct ? "direct" : "krylov"; }

SolverMethod parse_solver_method(const std::string& s)
{
  if (s == "direct") return SolverMethod::direct;
  if (s == "krylov") return SolverMethod::krylov;
  throw InvalidArgument("unknown solver '" + s + "' (expected direct or krylov)");
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

double relative_residual(const SpMat& K, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
  return (b - K * x).norm() / b.norm();
}

int solve_direct(const SpMat& K, const Eigen::VectorXd& b, double tol, Eigen::VectorXd& x)
{
#ifdef NCMIXED_HAVE_UMFPACK
  Eigen::UmfPackLU<SpMat> lu;
#else
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
#endif
  lu.compute(K);
  if (lu.info() != Eigen::Success) throw SolverFailure("sparse LU factorization failed", 1.0);
  x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SolverFailure("sparse LU solve failed", 1.0);
  int steps = 0;
  for (; steps < 3 && relative_residual(K, x, b) > tol; ++steps) x += lu.solve(Eigen::VectorXd(b - K * x));
  return steps;
}

int solve_minres(const SpMat& K, const Eigen::VectorXd& b, const Eigen::VectorXd& minv, double tol, int max_iter,
                 Eigen::VectorXd& x)
{
  const Eigen::Index n = b.size();
  x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v_old = Eigen::VectorXd::Zero(n), v = b, w_old = v_old, w = v_old;
  Eigen::VectorXd z = minv.cwiseProduct(v);
  double gamma_old = 1.0, gamma = std::sqrt(z.dot(v));
  double eta = gamma;
  const double eta0 = gamma;
  double s_old = 0.0, s = 0.0, c_old = 1.0, c = 1.0;
  // The preconditioned residual |eta| only estimates the true one, so aim lower
  // and confirm with the true residual.
  double target = 0.1 * tol;
  for (int it = 1; it <= max_iter; ++it) {
    z /= gamma;
    const Eigen::VectorXd Kz = K * z;
    const double delta = Kz.dot(z);
    Eigen::VectorXd v_new = Kz - (delta / gamma) * v - (gamma / gamma_old) * v_old;
    Eigen::VectorXd z_new = minv.cwiseProduct(v_new);
    const double gamma_new = std::sqrt(std::max(0.0, z_new.dot(v_new)));
    const double a0 = c * delta - c_old * s * gamma;
    const double a1 = std::hypot(a0, gamma_new);
    const double a2 = s * delta + c_old * c * gamma;
    const double a3 = s_old * gamma;
    if (a1 == 0.0) throw SolverFailure("MINRES breakdown", relative_residual(K, x, b));
    const double c_new = a0 / a1, s_new = gamma_new / a1;
    Eigen::VectorXd w_new = (z - a3 * w_old - a2 * w) / a1;
    x += c_new * eta * w_new;
    eta = -s_new * eta;

    v_old.swap(v);
    v.swap(v_new);
    z.swap(z_new);
    w_old.swap(w);
    w.swap(w_new);
    gamma_old = gamma;
    gamma = gamma_new;
    c_old = c;
    c = c_new;
    s_old = s;
    s = s_new;

    if (std::abs(eta) <= target * eta0 || gamma == 0.0) {
      if (relative_residual(K, x, b) <= tol) return it;
      target *= 0.1;
      if (gamma == 0.0) break;
    }
  }
  throw SolverFailure("MINRES did not converge", relative_residual(K, x, b));
}

Eigen::VectorXd block_diagonal_inverse(const SaddleSystem& sys)
{
  const int ns = sys.num_stress(), nu = sys.num_displacement();
  Eigen::VectorXd d(ns + nu);
  const Eigen::VectorXd a = sys.A.diagonal();
  for (int i = 0; i < ns; ++i) {
    if (!(a[i] > 0.0)) throw SolverFailure("A block has a nonpositive diagonal entry", 1.0);
    d[i] = 1.0 / a[i];
  }
  Eigen::VectorXd s = Eigen::VectorXd::Zero(nu);
  for (int k = 0; k < sys.B.outerSize(); ++k)
    for (SpMat::InnerIterator it(sys.B, k); it; ++it) s[it.row()] += it.value() * it.value() / a[it.col()];
  for (int i = 0; i < nu; ++i) {
    if (!(s[i] > 0.0)) throw SolverFailure("displacement dof not coupled to any stress dof", 1.0);
    d[ns + i] = 1.0 / s[i];
  }
  return d;
}

}  // namespace

SolveReport solve_saddle(const SaddleSystem& sys, const SolverOptions& opts)
{
  if (!(opts.tol > 0.0)) throw InvalidArgument("solve_saddle: tolerance must be positive");
  const int ns = sys.num_stress(), nu = sys.num_displacement();
  if (sys.A.cols() != ns || sys.B.cols() != ns || sys.G.size() != ns || sys.F.size() != nu)
    throw InvalidArgument("solve_saddle: inconsistent block sizes");

  SolveReport rep;
  rep.method = opts.method;
  const Eigen::VectorXd b = sys.rhs();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  if (b.norm() > 0.0) {
    const SpMat K = sys.matrix();
    rep.nonzeros = K.nonZeros();
    if (opts.method == SolverMethod::direct)
      rep.iterations = solve_direct(K, b, opts.tol, x);
    else
      rep.iterations = solve_minres(K, b, block_diagonal_inverse(sys), opts.tol, opts.max_iterations, x);
    rep.residual = relative_residual(K, x, b);
    if (!(rep.residual <= opts.tol))
      throw SolverFailure("relative residual " + std::to_string(rep.residual) + " above tolerance", rep.residual);
  }
  rep.sigma = x.head(ns);
  rep.u = x.tail(nu);
  return rep;
}

}  // namespace ncmixed
