#include "ncmixed/fields.hpp"

#include <ostream>

namespace ncmixed {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

// Integral over face f of (tau n_f) . (lambda_a e_k), index 3a + k, with the
// face's global normal and sorted vertex order.
template <class Eval>
Eigen::Matrix<double, 9, 1> face_moments(const TetMesh& mesh, int f, const Eval& tau, int degree)
{
  const Face& face = mesh.faces()[f];
  const auto P = mesh.face_points(f);
  const QuadRule& rule = simplex_quadrature(2, std::max(degree, 3));
  Eigen::Matrix<double, 9, 1> m = Eigen::Matrix<double, 9, 1>::Zero();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& b = rule.points[q];
    const Vec3 tn = tau(bary_to_point(b, P)) * face.normal;
    const double w = face.area * rule.weights[q];
    for (int a = 0; a < 3; ++a) m.segment<3>(3 * a) += (w * b[a]) * tn;
  }
  return m;
}

template <class Eval>
Eigen::Matrix<double, 6, 1> cell_moments(const TetGeometry& K, const Eval& tau, int degree)
{
  const QuadRule& rule = simplex_quadrature(3, degree);
  const double vol = K.volume();
  Eigen::Matrix<double, 6, 1> m = Eigen::Matrix<double, 6, 1>::Zero();
  for (std::size_t q = 0; q < rule.size(); ++q)
    m += (vol * rule.weights[q]) * to_components(tau(bary_to_point(rule.points[q], K.p)));
  return m;
}

// tau(t, x) evaluates the field as seen from tet t.
template <class ElementEval>
Eigen::VectorXd interpolate_dofs(const MixedSpace& space, const ElementEval& tau, int face_degree, int cell_degree)
{
  const TetMesh& mesh = space.mesh();
  const DofMap& dm = space.dofs();
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(dm.num_stress());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const int t = mesh.faces()[f].tets[0];
    dofs.segment<9>(dm.face_offset(f)) =
        face_moments(mesh, f, [&](const Vec3& x) { return tau(t, x); }, face_degree);
  }
  if (space.variant() == Variant::full)
    for (int t = 0; t < mesh.num_tets(); ++t)
      dofs.segment<6>(dm.cell_offset(t)) =
          cell_moments(space.geometry(t), [&](const Vec3& x) { return tau(t, x); }, cell_degree);
  return dofs;
}

// Integral over the tet of f(x) with a degree-q rule.
template <class F>
double integrate(const TetGeometry& K, int degree, const F& f)
{
  const QuadRule& rule = simplex_quadrature(3, degree);
  const double vol = K.volume();
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) s += vol * rule.weights[q] * f(bary_to_point(rule.points[q], K.p));
  return s;
}

template <class ValueEval>
double face_form(const DiscreteStressField& tau, const ValueEval& u, int degree)
{
  const TetMesh& mesh = tau.space().mesh();
  const QuadRule& rule = simplex_quadrature(2, degree);
  double e = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.faces()[f];
    if (face.boundary) continue;
    const auto P = mesh.face_points(f);
    const Vec3& n = face.normal;
    const int a = face.tets[0], b = face.tets[1];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = bary_to_point(rule.points[q], P);
      Vec3 jump = (tau.value(a, x) - tau.value(b, x)) * n;
      jump -= n.dot(jump) * n;
      e += face.area * rule.weights[q] * jump.dot(u(a, x));
    }
  }
  return e;
}

template <class ValueEval, class GradEval>
double volume_form(const DiscreteStressField& tau, const ValueEval& u, const GradEval& grad, int degree)
{
  const MixedSpace& space = tau.space();
  double e = 0.0;
  for (int t = 0; t < space.num_tets(); ++t)
    e += integrate(space.geometry(t), degree, [&](const Vec3& x) {
      const Mat3 g = grad(t, x);
      const Mat3 eps = 0.5 * (g + g.transpose());
      return (eps.array() * tau.value(t, x).array()).sum() + tau.divergence(t, x).dot(u(t, x));
    });
  return e;
}

}  // namespace

DiscreteStressField::DiscreteStressField(const MixedSpace& space, Eigen::VectorXd dofs)
    : space_(&space), dofs_(std::move(dofs))
{
  if (dofs_.size() != space.dofs().num_stress())
    throw InvalidArgument("DiscreteStressField: expected " + std::to_string(space.dofs().num_stress()) + " dofs");
  coeffs_.reserve(space.num_tets());
  for (int t = 0; t < space.num_tets(); ++t) coeffs_.push_back(space.stress_basis(t).combine(local_dofs(t)));
}

Eigen::VectorXd DiscreteStressField::local_dofs(int t) const
{
  const auto idx = space_->dofs().stress_indices(t);
  Eigen::VectorXd l(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) l[k] = dofs_[idx[k]];
  return l;
}

Mat3 DiscreteStressField::value(int t, const Vec3& x) const
{
  return eval_sym_tensor(as_span(coeffs_[t]), space_->stress_basis(t).frame, x);
}

Vec3 DiscreteStressField::divergence(int t, const Vec3& x) const
{
  return eval_sym_tensor_div(as_span(coeffs_[t]), space_->stress_basis(t).frame, x);
}

DiscreteDisplacementField::DiscreteDisplacementField(const MixedSpace& space, Eigen::VectorXd dofs)
    : space_(&space), dofs_(std::move(dofs))
{
  if (dofs_.size() != space.dofs().num_displacement())
    throw InvalidArgument("DiscreteDisplacementField: expected " +
                          std::to_string(space.dofs().num_displacement()) + " dofs");
}

Vec3 DiscreteDisplacementField::value(int t, const Vec3& x) const
{
  const DisplacementShapeBasis& db = space_->displacement_basis(t);
  const auto idx = space_->dofs().displacement_indices(t);
  Eigen::VectorXd l(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) l[k] = dofs_[idx[k]];
  const Eigen::VectorXd c = db.coeffs * l;
  return eval_linear_vector(as_span(c), db.frame, x);
}

ContinuousLinearField::ContinuousLinearField(const TetMesh& mesh, std::vector<Vec3> nodal)
    : mesh_(&mesh), nodal_(std::move(nodal))
{
  if (static_cast<int>(nodal_.size()) != mesh.num_vertices())
    throw InvalidArgument("ContinuousLinearField: one value per vertex required");
  grads_.reserve(mesh.num_tets());
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto p = mesh.tet_points(t);
    const auto& v = mesh.tets()[t];
    Mat3 E, D;
    for (int k = 0; k < 3; ++k) {
      E.col(k) = p[k + 1] - p[0];
      D.col(k) = nodal_[v[k + 1]] - nodal_[v[0]];
    }
    grads_.push_back(D * E.inverse());
  }
}

Vec3 ContinuousLinearField::value(int t, const Vec3& x) const
{
  const auto& v = mesh_->tets()[t];
  return nodal_[v[0]] + grads_[t] * (x - mesh_->vertices()[v[0]]);
}

std::vector<bool> ContinuousLinearField::boundary_vertices(const TetMesh& mesh)
{
  std::vector<bool> on(mesh.num_vertices(), false);
  for (const Face& f : mesh.faces())
    if (f.boundary)
      for (int v : f.v) on[v] = true;
  return on;
}

DiscreteStressField interpolate_stress(const MixedSpace& space, const TensorFunction& tau, int face_degree,
                                       int cell_degree)
{
  return DiscreteStressField(
      space, interpolate_dofs(space, [&](int, const Vec3& x) { return tau(x); }, face_degree, cell_degree));
}

DiscreteStressField interpolate_stress(const MixedSpace& space, const DiscreteStressField& tau)
{
  // Element restrictions are quadratic, so degree-4 rules are exact.
  return DiscreteStressField(space,
                             interpolate_dofs(space, [&](int t, const Vec3& x) { return tau.value(t, x); }, 4, 4));
}

DiscreteDisplacementField project_displacement(const MixedSpace& space, const VectorFunction& v, int degree)
{
  const DofMap& dm = space.dofs();
  Eigen::VectorXd dofs(dm.num_displacement());
  const QuadRule& rule = simplex_quadrature(3, degree);
  for (int t = 0; t < space.num_tets(); ++t) {
    const TetGeometry& K = space.geometry(t);
    const DisplacementShapeBasis& db = space.displacement_basis(t);
    const double vol = K.volume();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(kNumVectorLinears, kNumVectorLinears);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(kNumVectorLinears);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = bary_to_point(rule.points[q], K.p);
      const Vec3 xi = db.frame.to_local(x);
      const Eigen::Vector4d m(1.0, xi[0], xi[1], xi[2]);
      const double w = vol * rule.weights[q];
      const Vec3 vx = v(x);
      for (int k = 0; k < 3; ++k) {
        M.block<4, 4>(4 * k, 4 * k) += w * m * m.transpose();
        b.segment<4>(4 * k) += (w * vx[k]) * m;
      }
    }
    const Eigen::MatrixXd Ml = db.coeffs.transpose() * M * db.coeffs;
    const Eigen::VectorXd c = Ml.llt().solve(db.coeffs.transpose() * b);
    dofs.segment(dm.displacement_offset(t), c.size()) = c;
  }
  return DiscreteDisplacementField(space, std::move(dofs));
}

double commutativity_residual(const MixedSpace& space, const TensorFunction& tau, const VectorFunction& div_tau,
                              int face_degree)
{
  const DiscreteStressField pi = interpolate_stress(space, tau, face_degree, 8);
  const DiscreteDisplacementField p = project_displacement(space, div_tau);
  double s = 0.0;
  for (int t = 0; t < space.num_tets(); ++t)
    s += integrate(space.geometry(t), 2, [&](const Vec3& x) { return (pi.divergence(t, x) - p.value(t, x)).squaredNorm(); });
  return std::sqrt(s);
}

double consistency_error(const VectorFunction& u, const DiscreteStressField& tau, int degree)
{
  return face_form(tau, [&](int, const Vec3& x) { return u(x); }, degree);
}

double consistency_error(const ContinuousLinearField& w, const DiscreteStressField& tau, int degree)
{
  return face_form(tau, [&](int t, const Vec3& x) { return w.value(t, x); }, degree);
}

double consistency_error_volume(const VectorFunction& u, const GradientFunction& grad_u,
                                const DiscreteStressField& tau, int degree)
{
  return volume_form(
      tau, [&](int, const Vec3& x) { return u(x); }, [&](int, const Vec3& x) { return grad_u(x); }, degree);
}

double consistency_error_volume(const ContinuousLinearField& w, const DiscreteStressField& tau, int degree)
{
  return volume_form(
      tau, [&](int t, const Vec3& x) { return w.value(t, x); }, [&](int t, const Vec3&) { return w.gradient(t); },
      degree);
}

double stress_error(const DiscreteStressField& sigma_h, const TensorFunction& sigma, int degree)
{
  const MixedSpace& space = sigma_h.space();
  double s = 0.0;
  for (int t = 0; t < space.num_tets(); ++t)
    s += integrate(space.geometry(t), degree,
                   [&](const Vec3& x) { return (sigma(x) - sigma_h.value(t, x)).squaredNorm(); });
  return std::sqrt(s);
}

double divergence_error(const DiscreteStressField& sigma_h, const VectorFunction& div_sigma, int degree)
{
  const MixedSpace& space = sigma_h.space();
  double s = 0.0;
  for (int t = 0; t < space.num_tets(); ++t)
    s += integrate(space.geometry(t), degree,
                   [&](const Vec3& x) { return (div_sigma(x) - sigma_h.divergence(t, x)).squaredNorm(); });
  return std::sqrt(s);
}

double displacement_error(const DiscreteDisplacementField& u_h, const VectorFunction& u, int degree)
{
  const MixedSpace& space = u_h.space();
  double s = 0.0;
  for (int t = 0; t < space.num_tets(); ++t)
    s += integrate(space.geometry(t), degree, [&](const Vec3& x) { return (u(x) - u_h.value(t, x)).squaredNorm(); });
  return std::sqrt(s);
}

ErrorNorms error_norms(const TensorFunction& sigma, const VectorFunction& div_sigma, const VectorFunction& u,
                       const DiscreteStressField& sigma_h, const DiscreteDisplacementField& u_h, int degree)
{
  return {stress_error(sigma_h, sigma, degree), divergence_error(sigma_h, div_sigma, degree),
          displacement_error(u_h, u, degree)};
}

void write_samples(std::ostream& os, const DiscreteStressField& sigma_h, const DiscreteDisplacementField& u_h)
{
  const MixedSpace& space = sigma_h.space();
  os.precision(12);
  os << "x,y,z,sxx,sxy,sxz,syy,syz,szz,ux,uy,uz\n";
  for (int t = 0; t < space.num_tets(); ++t) {
    const Vec3 c = space.stress_basis(t).frame.centroid;
    const auto s = to_components(sigma_h.value(t, c));
    const Vec3 u = u_h.value(t, c);
    os << c[0] << ',' << c[1] << ',' << c[2];
    for (int k = 0; k < 6; ++k) os << ',' << s[k];
    os << ',' << u[0] << ',' << u[1] << ',' << u[2] << '\n';
  }
}

}  // namespace ncmixed
