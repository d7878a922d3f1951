#include "ncmixed/cli.hpp"
#include "ncmixed/harness.hpp"
#include "ncmixed/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ncmixed;

namespace {

TetGeometry tet_from_rows(const Eigen::Matrix<double, 4, 3>& v)
{
  std::array<Vec3, 4> p;
  for (int i = 0; i < 4; ++i) p[i] = v.row(i).transpose();
  if (signed_volume(p[0], p[1], p[2], p[3]) < 0) std::swap(p[2], p[3]);
  return TetGeometry(p);
}

py::dict element_report_dict(const Eigen::Matrix<double, 4, 3>& v)
{
  const ElementReport r = element_report(tet_from_rows(v));
  py::dict d;
  d["volume"] = r.volume;
  d["shape_ratio"] = r.shape_ratio;
  d["dim_full"] = r.dim_full;
  d["dim_reduced"] = r.dim_reduced;
  d["condition_full"] = r.condition_full;
  d["condition_reduced"] = r.condition_reduced;
  d["duality_error"] = r.duality_error;
  d["lemma_residual"] = r.lemma_residual;
  d["determinant_numeric"] = r.determinant_numeric;
  d["determinant_closed_form"] = r.determinant_closed_form;
  d["determinant_ok"] = r.determinant_ok;
  d["passed"] = r.passed();
  return d;
}

SolverOptions make_options(const std::string& solver, double tol)
{
  SolverOptions o;
  o.method = parse_solver_method(solver);
  o.tol = tol;
  return o;
}

/// Solves one level and returns the report plus centroid samples.
py::dict solve_level(const std::string& case_name, int n, const std::string& variant, double lambda, double mu,
                     const std::string& solver, double tol)
{
  const ManufacturedSolution ms = manufactured(case_name, lambda, mu);
  LevelArtifacts a;
  ConvergenceReport r;
  r.case_name = case_name;
  r.variant = parse_variant(variant);
  r.lambda = lambda;
  r.mu = mu;
  r.solver = solver;
  r.tol = tol;
  {
    py::gil_scoped_release release;
    r.levels.push_back(run_level(ms, r.variant, n, make_options(solver, tol), &a));
  }
  const int T = a.mesh->num_tets();
  Eigen::MatrixXd centroids(T, 3), stress(T, 6), displacement(T, 3);
  for (int t = 0; t < T; ++t) {
    const auto p = a.mesh->tet_points(t);
    const Vec3 c = 0.25 * (p[0] + p[1] + p[2] + p[3]);
    centroids.row(t) = c.transpose();
    stress.row(t) = to_components(a.sigma_h->value(t, c)).transpose();
    displacement.row(t) = a.u_h->value(t, c).transpose();
  }
  py::dict d;
  d["report"] = report_to_json(r);
  d["sigma_dofs"] = a.sigma_h->dofs();
  d["u_dofs"] = a.u_h->dofs();
  d["centroids"] = centroids;
  d["stress"] = stress;
  d["displacement"] = displacement;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Nonconforming mixed finite elements for linear elasticity on tetrahedra";

  // Translators run newest first, so the base class is registered first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);
  py::register_exception<DegenerateGeometry>(m, "DegenerateGeometry", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  m.def("manufactured_cases", &manufactured_cases);
  m.def("vertex_system_determinant", [](double a, double b) { return vertex_system_matrix(a, b).determinant; },
        py::arg("a"), py::arg("b"));
  m.def("vertex_system_determinant_closed_form", &vertex_system_determinant_closed_form, py::arg("a"), py::arg("b"));
  m.def("element_report", &element_report_dict, py::arg("vertices"),
        "Element checks for a tet given as a 4x3 array of vertex coordinates.");

  m.def(
      "box_mesh",
      [](int n) {
        const TetMesh mesh = build_box_mesh(n);
        Eigen::MatrixXd v(mesh.num_vertices(), 3);
        Eigen::MatrixXi t(mesh.num_tets(), 4);
        for (int i = 0; i < mesh.num_vertices(); ++i) v.row(i) = mesh.vertices()[i].transpose();
        for (int i = 0; i < mesh.num_tets(); ++i)
          for (int k = 0; k < 4; ++k) t(i, k) = mesh.tets()[i][k];
        return py::make_tuple(v, t, mesh.num_faces(), mesh.num_edges());
      },
      py::arg("n"), "Kuhn mesh of the unit cube: (vertices, tets, num_faces, num_edges).");

  m.def(
      "convergence_json",
      [](const std::string& case_name, const std::string& variant, const std::vector<int>& levels, double lambda,
         double mu, const std::string& solver, double tol) {
        py::gil_scoped_release release;
        return report_to_json(
            run_convergence(case_name, parse_variant(variant), levels, lambda, mu, make_options(solver, tol)));
      },
      py::arg("case"), py::arg("variant"), py::arg("levels"), py::arg("lam"), py::arg("mu"), py::arg("solver"),
      py::arg("tol"));

  m.def("solve_level", &solve_level, py::arg("case"), py::arg("n"), py::arg("variant"), py::arg("lam"), py::arg("mu"),
        py::arg("solver"), py::arg("tol"));

  m.def(
      "verification",
      [](unsigned seed) {
        py::list out;
        for (const CheckResult& c : run_verification(seed)) {
          py::dict d;
          d["name"] = c.name;
          d["passed"] = c.passed;
          d["value"] = c.value;
          d["threshold"] = c.threshold;
          d["detail"] = c.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 20240601u);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli_main(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process: (exit code, stdout, stderr).");
}
