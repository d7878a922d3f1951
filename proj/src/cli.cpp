#include "ncmixed/cli.hpp"

#include "ncmixed/harness.hpp"
#include "ncmixed/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ncmixed {

namespace {

using json = nlohmann::json;

struct StudyFlags {
  std::string case_name = "sine";
  std::string variant = "full";
  double lambda = 1.0;
  double mu = 1.0;
  std::string solver = "direct";
  double tol = 1e-10;
  std::string out;
  std::string format = "json";
};

void add_study_flags(CLI::App* cmd, StudyFlags& f)
{
  cmd->add_option("--case", f.case_name, "Manufactured solution")
      ->check(CLI::IsMember(manufactured_cases()))
      ->capture_default_str();
  cmd->add_option("--variant", f.variant, "Element variant")
      ->check(CLI::IsMember({"full", "reduced"}))
      ->capture_default_str();
  cmd->add_option("--lambda", f.lambda, "First Lame parameter")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--mu", f.mu, "Shear modulus")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--solver", f.solver, "Linear solver")
      ->check(CLI::IsMember({"direct", "krylov"}))
      ->capture_default_str();
  cmd->add_option("--tol", f.tol, "Relative residual tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--out", f.out, "Report path (default: standard output)");
  cmd->add_option("--format", f.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

SolverOptions solver_options(const StudyFlags& f)
{
  SolverOptions o;
  o.method = parse_solver_method(f.solver);
  o.tol = f.tol;
  return o;
}

template <class Writer>
void write_file(const std::string& path, Writer&& w)
{
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot open " + path + " for writing");
  w(os);
  if (!os) throw Error("write to " + path + " failed");
}

void emit_report(const ConvergenceReport& r, const StudyFlags& f, std::ostream& out)
{
  std::string text;
  if (f.format == "csv") {
    std::ostringstream os;
    write_report_csv(os, r);
    text = os.str();
  } else {
    text = report_to_json(r) + "\n";
  }
  if (f.out.empty())
    out << text;
  else
    write_file(f.out, [&](std::ostream& os) { os << text; });
}

void print_summary(const ConvergenceReport& r, std::ostream& out)
{
  out << std::setprecision(4);
  for (const LevelResult& l : r.levels)
    out << "n=" << l.n << "  n_sigma=" << l.n_sigma << "  n_u=" << l.n_u << "  err_sigma=" << l.err_sigma
        << "  err_div=" << l.err_div << "  err_u=" << l.err_u << "  residual=" << l.residual << "  time=" << l.wall_time
        << "s\n";
  for (const RateRow& k : r.rates)
    out << "rates " << k.from_n << "->" << k.to_n << ": sigma " << k.sigma << "  div " << k.div << "  u " << k.u
        << "  consistency " << k.consistency << "\n";
}

int run_convergence_cmd(const StudyFlags& f, const std::vector<int>& levels, std::ostream& out, std::ostream& err)
{
  try {
    const ConvergenceReport r =
        run_convergence(f.case_name, parse_variant(f.variant), levels, f.lambda, f.mu, solver_options(f));
    emit_report(r, f, out);
    if (!f.out.empty()) print_summary(r, out);
    return kExitOk;
  } catch (const StudyFailure& e) {
    err << "error: " << e.what() << "\n";
    if (!f.out.empty()) emit_report(e.partial(), f, out);
    return kExitFailure;
  }
}

int run_solve_cmd(const StudyFlags& f, int n, const std::string& dump_mesh, const std::string& dump_system,
                  const std::string& sample, std::ostream& out, std::ostream& err)
{
  const ManufacturedSolution ms = manufactured(f.case_name, f.lambda, f.mu);
  LevelArtifacts a;
  ConvergenceReport r;
  r.case_name = f.case_name;
  r.variant = parse_variant(f.variant);
  r.lambda = f.lambda;
  r.mu = f.mu;
  r.solver = f.solver;
  r.tol = f.tol;
  try {
    r.levels.push_back(run_level(ms, r.variant, n, solver_options(f), &a));
  } catch (const SolverFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  if (!dump_mesh.empty()) write_file(dump_mesh, [&](std::ostream& os) { write_mesh(os, *a.mesh); });
  if (!dump_system.empty()) write_file(dump_system, [&](std::ostream& os) { write_system(os, a.system); });
  if (!sample.empty()) write_file(sample, [&](std::ostream& os) { write_samples(os, *a.sigma_h, *a.u_h); });
  emit_report(r, f, out);
  if (!f.out.empty()) print_summary(r, out);
  return kExitOk;
}

int run_element_report_cmd(const std::vector<double>& v, const std::string& format, std::ostream& out)
{
  if (v.size() != 12) throw InvalidArgument("--tet expects 12 comma-separated coordinates");
  std::array<Vec3, 4> p;
  for (int i = 0; i < 4; ++i) p[i] = Vec3(v[3 * i], v[3 * i + 1], v[3 * i + 2]);
  if (signed_volume(p[0], p[1], p[2], p[3]) < 0) std::swap(p[2], p[3]);
  const ElementReport r = element_report(TetGeometry(p));
  const char* det = r.determinant_ok ? "PASS" : "FAIL";
  if (format == "json") {
    json j;
    j["volume"] = r.volume;
    j["shape_ratio"] = r.shape_ratio;
    j["dim_full"] = r.dim_full;
    j["dim_reduced"] = r.dim_reduced;
    j["condition_full"] = r.condition_full;
    j["condition_reduced"] = r.condition_reduced;
    j["duality_error"] = r.duality_error;
    j["lemma_residual"] = r.lemma_residual;
    j["determinant_numeric"] = r.determinant_numeric;
    j["determinant_closed_form"] = r.determinant_closed_form;
    j["determinant_check"] = det;
    j["passed"] = r.passed();
    out << j.dump(2) << "\n";
  } else {
    out << std::setprecision(6) << "volume              " << r.volume << "\n"
        << "shape ratio         " << r.shape_ratio << "\n"
        << "dim full            " << r.dim_full << "\n"
        << "dim reduced         " << r.dim_reduced << "\n"
        << "condition full      " << r.condition_full << "\n"
        << "condition reduced   " << r.condition_reduced << "\n"
        << "duality error       " << r.duality_error << "\n"
        << "edge polynomial     " << r.lemma_residual << "\n"
        << std::setprecision(12) << "determinant (3,2)   " << r.determinant_numeric << " vs "
        << r.determinant_closed_form << " " << det << "\n"
        << "overall             " << (r.passed() ? "PASS" : "FAIL") << "\n";
  }
  return r.passed() ? kExitOk : kExitFailure;
}

int run_verify_cmd(unsigned seed, const std::string& format, std::ostream& out)
{
  const std::vector<CheckResult> checks = run_verification(seed);
  bool ok = true;
  if (format == "json") {
    json j = json::array();
    for (const CheckResult& c : checks)
      j.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"value", c.value},
                   {"threshold", c.threshold},
                   {"detail", c.detail}});
    out << j.dump(2) << "\n";
  } else {
    out << std::setprecision(3);
    for (const CheckResult& c : checks)
      out << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(36) << c.name << std::right << c.value
          << " <= " << c.threshold << "  (" << c.detail << ")\n";
  }
  for (const CheckResult& c : checks) ok = ok && c.passed;
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app("Nonconforming mixed finite elements for linear elasticity on tetrahedra", "ncmixed");
  app.require_subcommand(1);

  StudyFlags conv_flags;
  std::vector<int> levels{2, 4, 8};
  CLI::App* conv = app.add_subcommand("convergence", "Manufactured-solution convergence study");
  add_study_flags(conv, conv_flags);
  conv->add_option("--levels", levels, "Mesh subdivisions per level, comma separated")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);

  StudyFlags solve_flags;
  int n = 4;
  std::string dump_mesh, dump_system, sample;
  CLI::App* solve = app.add_subcommand("solve", "Solve one manufactured problem on an n x n x n mesh");
  add_study_flags(solve, solve_flags);
  solve->add_option("--n", n, "Subdivisions per axis")->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--dump-mesh", dump_mesh, "Write the mesh to this path");
  solve->add_option("--dump-system", dump_system, "Write the saddle system to this path");
  solve->add_option("--sample", sample, "Write centroid samples of the solution to this path");

  std::vector<double> tet{0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::string element_format = "text";
  CLI::App* elem = app.add_subcommand("element-report", "Element-level checks on one tetrahedron");
  elem->add_option("--tet", tet, "Vertex coordinates x0,y0,z0,...,x3,y3,z3")->delimiter(',')->expected(12);
  elem->add_option("--format", element_format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  unsigned seed = 20240601;
  std::string verify_format = "text";
  CLI::App* ver = app.add_subcommand("verify", "Run the element and mesh property suite");
  ver->add_option("--seed", seed, "Random seed")->capture_default_str();
  ver->add_option("--format", verify_format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  std::vector<std::string> argv_store{"ncmixed"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*conv) return run_convergence_cmd(conv_flags, levels, out, err);
    if (*solve) return run_solve_cmd(solve_flags, n, dump_mesh, dump_system, sample, out, err);
    if (*elem) return run_element_report_cmd(tet, element_format, out);
    if (*ver) return run_verify_cmd(seed, verify_format, out);
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DegenerateGeometry& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ncmixed
