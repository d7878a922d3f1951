#include "ncmixed/harness.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ostream>

namespace ncmixed {

namespace {

using json = nlohmann::json;

// u with its gradient and the Hessians of its three components.
struct ClosedForm {
  std::function<Vec3(const Vec3&)> u;
  std::function<Mat3(const Vec3&)> grad;
  std::function<std::array<Mat3, 3>(const Vec3&)> hess;
};

ClosedForm sine_case()
{
  const double pi = M_PI;
  ClosedForm c;
  c.u = [=](const Vec3& x) {
    return Vec3::Constant(std::sin(pi * x[0]) * std::sin(pi * x[1]) * std::sin(pi * x[2]));
  };
  c.grad = [=](const Vec3& x) {
    const Vec3 s = (pi * x).array().sin(), co = (pi * x).array().cos();
    const Vec3 g = pi * Vec3(co[0] * s[1] * s[2], s[0] * co[1] * s[2], s[0] * s[1] * co[2]);
    Mat3 G;
    for (int i = 0; i < 3; ++i) G.row(i) = g.transpose();
    return G;
  };
  c.hess = [=](const Vec3& x) {
    const Vec3 s = (pi * x).array().sin(), co = (pi * x).array().cos();
    Mat3 H;
    H(0, 0) = H(1, 1) = H(2, 2) = -s[0] * s[1] * s[2];
    H(0, 1) = H(1, 0) = co[0] * co[1] * s[2];
    H(0, 2) = H(2, 0) = co[0] * s[1] * co[2];
    H(1, 2) = H(2, 1) = s[0] * co[1] * co[2];
    H *= pi * pi;
    return std::array<Mat3, 3>{H, H, H};
  };
  return c;
}

// u = (x^3 + y^2 z, y^3 + z^2 x, z^3 + x^2 y)
ClosedForm poly3_case()
{
  ClosedForm c;
  c.u = [](const Vec3& p) {
    const double x = p[0], y = p[1], z = p[2];
    return Vec3(x * x * x + y * y * z, y * y * y + z * z * x, z * z * z + x * x * y);
  };
  c.grad = [](const Vec3& p) {
    const double x = p[0], y = p[1], z = p[2];
    Mat3 G;
    G << 3 * x * x, 2 * y * z, y * y, z * z, 3 * y * y, 2 * z * x, 2 * x * y, x * x, 3 * z * z;
    return G;
  };
  c.hess = [](const Vec3& p) {
    const double x = p[0], y = p[1], z = p[2];
    Mat3 H0, H1, H2;
    H0 << 6 * x, 0, 0, 0, 2 * z, 2 * y, 0, 2 * y, 0;
    H1 << 0, 0, 2 * z, 0, 6 * y, 0, 2 * z, 0, 2 * x;
    H2 << 2 * y, 2 * x, 0, 2 * x, 0, 0, 0, 0, 6 * z;
    return std::array<Mat3, 3>{H0, H1, H2};
  };
  return c;
}

Mat3 linear_case_matrix()
{
  Mat3 M;
  M << 1.0, 0.5, -0.25, 0.5, -0.75, 0.2, -0.25, 0.2, 0.5;
  return M;
}

ClosedForm linear_case()
{
  const Mat3 M = linear_case_matrix();
  ClosedForm c;
  c.u = [=](const Vec3& x) { return Vec3(M * x); };
  c.grad = [=](const Vec3&) { return M; };
  c.hess = [](const Vec3&) { return std::array<Mat3, 3>{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()}; };
  return c;
}

// Fixed interior points for the construction-time consistency check.
std::vector<Vec3> check_points()
{
  return {Vec3(0.5, 0.5, 0.5), Vec3(0.1, 0.7, 0.3), Vec3(0.9, 0.2, 0.6), Vec3(0.35, 0.05, 0.85),
          Vec3(0.62, 0.91, 0.14)};
}

}  // namespace

std::vector<std::string> manufactured_cases() { return {"sine", "poly3", "linear"}; }

ManufacturedSolution manufactured(const std::string& case_name, double lambda, double mu)
{
  const IsotropicCompliance c(lambda, mu);
  ClosedForm cf;
  if (case_name == "sine")
    cf = sine_case();
  else if (case_name == "poly3")
    cf = poly3_case();
  else if (case_name == "linear")
    cf = linear_case();
  else
    throw InvalidArgument("unknown manufactured case '" + case_name + "' (expected sine, poly3 or linear)");

  ManufacturedSolution ms;
  ms.name = case_name;
  ms.lambda = lambda;
  ms.mu = mu;
  ms.u = cf.u;
  ms.grad_u = cf.grad;
  ms.sigma = [grad = cf.grad, c](const Vec3& x) {
    const Mat3 g = grad(x);
    return stiffness_apply(c, 0.5 * (g + g.transpose()));
  };
  // f_k = mu sum_l d_ll u_k + (mu + lambda) sum_l d_kl u_l
  ms.f = [hess = cf.hess, lambda, mu](const Vec3& x) {
    const auto H = hess(x);
    Vec3 f;
    for (int k = 0; k < 3; ++k) {
      double grad_div = 0.0;
      for (int l = 0; l < 3; ++l) grad_div += H[l](k, l);
      f[k] = mu * H[k].trace() + (mu + lambda) * grad_div;
    }
    return f;
  };
  if (divergence_mismatch(ms, check_points()) > 1e-6)
    throw Error("manufactured case '" + case_name + "': load does not match div sigma");
  return ms;
}

double divergence_mismatch(const ManufacturedSolution& ms, const std::vector<Vec3>& points, double h)
{
  double worst = 0.0;
  for (const Vec3& x : points) {
    Vec3 div = Vec3::Zero();
    for (int j = 0; j < 3; ++j)
      div += (ms.sigma(x + h * Vec3::Unit(j)) - ms.sigma(x - h * Vec3::Unit(j))).col(j) / (2.0 * h);
    const Vec3 f = ms.f(x);
    worst = std::max(worst, (f - div).norm() / std::max(1.0, f.norm()));
  }
  return worst;
}

LevelResult run_level(const ManufacturedSolution& ms, Variant v, int n, const SolverOptions& opts,
                      LevelArtifacts* keep)
{
  const auto start = std::chrono::steady_clock::now();
  LevelArtifacts local;
  LevelArtifacts& a = keep ? *keep : local;
  a.mesh = std::make_unique<TetMesh>(build_box_mesh(n));
  a.space = std::make_unique<MixedSpace>(*a.mesh, v);
  a.system = assemble_system(*a.space, IsotropicCompliance(ms.lambda, ms.mu), ms.f, ms.u);
  SolveReport sol = solve_saddle(a.system, opts);
  a.sigma_h = std::make_unique<DiscreteStressField>(*a.space, std::move(sol.sigma));
  a.u_h = std::make_unique<DiscreteDisplacementField>(*a.space, std::move(sol.u));

  LevelResult r;
  r.n = n;
  r.h = mesh_quality(*a.mesh).h_max;
  r.n_sigma = a.space->dofs().num_stress();
  r.n_u = a.space->dofs().num_displacement();
  const ErrorNorms e = error_norms(ms.sigma, ms.f, ms.u, *a.sigma_h, *a.u_h);
  r.err_sigma = e.sigma;
  r.err_div = e.div;
  r.err_u = e.u;
  r.div_projection_error = displacement_error(project_displacement(*a.space, ms.f), ms.f);
  r.consistency_error = std::abs(consistency_error(ms.u, interpolate_stress(*a.space, ms.sigma)));
  r.residual = sol.residual;
  r.iterations = sol.iterations;
  r.max_condition = a.space->max_condition();
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void compute_rates(ConvergenceReport& report)
{
  report.rates.clear();
  const auto order = [](double e0, double e1, double h0, double h1) {
    return (e0 > 0.0 && e1 > 0.0) ? std::log(e0 / e1) / std::log(h0 / h1) : 0.0;
  };
  for (std::size_t k = 0; k + 1 < report.levels.size(); ++k) {
    const LevelResult &a = report.levels[k], &b = report.levels[k + 1];
    report.rates.push_back({a.n, b.n, order(a.err_sigma, b.err_sigma, a.h, b.h), order(a.err_div, b.err_div, a.h, b.h),
                            order(a.err_u, b.err_u, a.h, b.h),
                            order(a.consistency_error, b.consistency_error, a.h, b.h)});
  }
}

ConvergenceReport run_convergence(const std::string& case_name, Variant v, const std::vector<int>& levels,
                                  double lambda, double mu, const SolverOptions& opts)
{
  if (levels.empty()) throw InvalidArgument("run_convergence: no levels given");
  for (std::size_t k = 0; k < levels.size(); ++k)
    if (levels[k] < 1 || (k > 0 && levels[k] <= levels[k - 1]))
      throw InvalidArgument("run_convergence: levels must be positive and strictly increasing");
  const ManufacturedSolution ms = manufactured(case_name, lambda, mu);

  ConvergenceReport report;
  report.case_name = case_name;
  report.variant = v;
  report.lambda = lambda;
  report.mu = mu;
  report.solver = to_string(opts.method);
  report.tol = opts.tol;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    try {
      LevelResult r = run_level(ms, v, levels[k], opts);
      r.level = static_cast<int>(k);
      report.levels.push_back(r);
    } catch (const SolverFailure& e) {
      report.complete = false;
      report.failure = "level n=" + std::to_string(levels[k]) + ": " + e.what();
      compute_rates(report);
      throw StudyFailure(report.failure, e.residual(), report);
    }
  }
  compute_rates(report);
  return report;
}

std::string report_to_json(const ConvergenceReport& report, int indent)
{
  json j;
  j["case"] = report.case_name;
  j["variant"] = to_string(report.variant);
  j["lambda"] = report.lambda;
  j["mu"] = report.mu;
  j["solver"] = report.solver;
  j["tol"] = report.tol;
  j["complete"] = report.complete;
  if (!report.failure.empty()) j["failure"] = report.failure;
  j["levels"] = json::array();
  for (const LevelResult& r : report.levels)
    j["levels"].push_back({{"level", r.level},
                           {"n", r.n},
                           {"h", r.h},
                           {"n_sigma", r.n_sigma},
                           {"n_u", r.n_u},
                           {"err_sigma", r.err_sigma},
                           {"err_div", r.err_div},
                           {"err_u", r.err_u},
                           {"div_projection_error", r.div_projection_error},
                           {"consistency_error", r.consistency_error},
                           {"residual", r.residual},
                           {"iterations", r.iterations},
                           {"max_condition", r.max_condition},
                           {"wall_time", r.wall_time}});
  j["rates"] = json::array();
  for (const RateRow& r : report.rates)
    j["rates"].push_back({{"from_n", r.from_n},
                          {"to_n", r.to_n},
                          {"sigma", r.sigma},
                          {"div", r.div},
                          {"u", r.u},
                          {"consistency", r.consistency}});
  return j.dump(indent);
}

ConvergenceReport report_from_json(const std::string& text)
{
  ConvergenceReport report;
  try {
    const json j = json::parse(text);
    report.case_name = j.at("case").get<std::string>();
    report.variant = parse_variant(j.at("variant").get<std::string>());
    report.lambda = j.at("lambda").get<double>();
    report.mu = j.at("mu").get<double>();
    report.solver = j.at("solver").get<std::string>();
    report.tol = j.at("tol").get<double>();
    report.complete = j.at("complete").get<bool>();
    report.failure = j.value("failure", std::string());
    for (const json& l : j.at("levels")) {
      LevelResult r;
      r.level = l.at("level").get<int>();
      r.n = l.at("n").get<int>();
      r.h = l.at("h").get<double>();
      r.n_sigma = l.at("n_sigma").get<int>();
      r.n_u = l.at("n_u").get<int>();
      r.err_sigma = l.at("err_sigma").get<double>();
      r.err_div = l.at("err_div").get<double>();
      r.err_u = l.at("err_u").get<double>();
      r.div_projection_error = l.at("div_projection_error").get<double>();
      r.consistency_error = l.at("consistency_error").get<double>();
      r.residual = l.at("residual").get<double>();
      r.iterations = l.at("iterations").get<int>();
      r.max_condition = l.at("max_condition").get<double>();
      r.wall_time = l.at("wall_time").get<double>();
      report.levels.push_back(r);
    }
    for (const json& l : j.at("rates"))
      report.rates.push_back({l.at("from_n").get<int>(), l.at("to_n").get<int>(), l.at("sigma").get<double>(),
                              l.at("div").get<double>(), l.at("u").get<double>(), l.at("consistency").get<double>()});
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed convergence report: ") + e.what());
  }
  return report;
}

void write_report_csv(std::ostream& os, const ConvergenceReport& report)
{
  os.precision(10);
  os << "level,n,h,n_sigma,n_u,err_sigma,err_div,err_u,rate_sigma,rate_div,rate_u\n";
  for (std::size_t k = 0; k < report.levels.size(); ++k) {
    const LevelResult& r = report.levels[k];
    os << r.level << ',' << r.n << ',' << r.h << ',' << r.n_sigma << ',' << r.n_u << ',' << r.err_sigma << ','
       << r.err_div << ',' << r.err_u;
    if (k == 0 || k - 1 >= report.rates.size())
      os << ",,,";
    else
      os << ',' << report.rates[k - 1].sigma << ',' << report.rates[k - 1].div << ',' << report.rates[k - 1].u;
    os << '\n';
  }
}

}  // namespace ncmixed
