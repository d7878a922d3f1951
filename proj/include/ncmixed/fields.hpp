#pragma once

#include "ncmixed/assembly.hpp"

#include <iosfwd>

namespace ncmixed {

using GradientFunction = std::function<Mat3(const Vec3&)>;

/// Piecewise quadratic stress field given by global dof values.
class DiscreteStressField {
 public:
  DiscreteStressField(const MixedSpace& space, Eigen::VectorXd dofs);

  const MixedSpace& space() const { return *space_; }
  const Eigen::VectorXd& dofs() const { return dofs_; }
  Eigen::VectorXd local_dofs(int t) const;
  /// Monomial coefficients (60) of the restriction to tet t.
  const Eigen::VectorXd& element_coeffs(int t) const { return coeffs_[t]; }
  Mat3 value(int t, const Vec3& x) const;
  Vec3 divergence(int t, const Vec3& x) const;

 private:
  const MixedSpace* space_;
  Eigen::VectorXd dofs_;
  std::vector<Eigen::VectorXd> coeffs_;
};

/// Element-wise linear (or rigid-motion) displacement field.
class DiscreteDisplacementField {
 public:
  DiscreteDisplacementField(const MixedSpace& space, Eigen::VectorXd dofs);

  const MixedSpace& space() const { return *space_; }
  const Eigen::VectorXd& dofs() const { return dofs_; }
  Vec3 value(int t, const Vec3& x) const;

 private:
  const MixedSpace* space_;
  Eigen::VectorXd dofs_;
};

/// Continuous piecewise linear vector field from nodal values.
class ContinuousLinearField {
 public:
  ContinuousLinearField(const TetMesh& mesh, std::vector<Vec3> nodal);

  const std::vector<Vec3>& nodal() const { return nodal_; }
  Vec3 value(int t, const Vec3& x) const;
  Mat3 gradient(int t) const { return grads_[t]; }
  /// Mask of vertices lying on a boundary face.
  static std::vector<bool> boundary_vertices(const TetMesh& mesh);

 private:
  const TetMesh* mesh_;
  std::vector<Vec3> nodal_;
  std::vector<Mat3> grads_;
};

/// Interpolant from the dof functionals. Face moments are computed once per
/// face, so shared dofs are single valued by construction.
DiscreteStressField interpolate_stress(const MixedSpace& space, const TensorFunction& tau, int face_degree = 8,
                                       int cell_degree = 8);
/// Re-interpolation of a discrete field from its own element polynomials.
DiscreteStressField interpolate_stress(const MixedSpace& space, const DiscreteStressField& tau);

/// Element-wise L2 projection onto the displacement space.
DiscreteDisplacementField project_displacement(const MixedSpace& space, const VectorFunction& v, int degree = 8);

/// || div_h Pi_h tau - P_h div tau ||_0.
double commutativity_residual(const MixedSpace& space, const TensorFunction& tau, const VectorFunction& div_tau,
                              int face_degree = 8);

/// Sum over interior faces of the integral of (Q_n [tau n]) . u, where [tau n]
/// is the jump across the face and Q_n drops the normal component.
double consistency_error(const VectorFunction& u, const DiscreteStressField& tau, int degree = 8);
double consistency_error(const ContinuousLinearField& w, const DiscreteStressField& tau, int degree = 8);

/// Sum over tets of the integral of eps(u) : tau + div tau . u. Equals the
/// face form when u vanishes on the boundary.
double consistency_error_volume(const VectorFunction& u, const GradientFunction& grad_u,
                                const DiscreteStressField& tau, int degree = 8);
double consistency_error_volume(const ContinuousLinearField& w, const DiscreteStressField& tau, int degree = 8);

double stress_error(const DiscreteStressField& sigma_h, const TensorFunction& sigma, int degree = 8);
double divergence_error(const DiscreteStressField& sigma_h, const VectorFunction& div_sigma, int degree = 8);
double displacement_error(const DiscreteDisplacementField& u_h, const VectorFunction& u, int degree = 8);

struct ErrorNorms {
  double sigma = 0.0;
  double div = 0.0;
  double u = 0.0;
};

ErrorNorms error_norms(const TensorFunction& sigma, const VectorFunction& div_sigma, const VectorFunction& u,
                       const DiscreteStressField& sigma_h, const DiscreteDisplacementField& u_h, int degree = 8);

/// CSV with header x,y,z,sxx,sxy,sxz,syy,syz,szz,ux,uy,uz; one row per tet centroid.
void write_samples(std::ostream& os, const DiscreteStressField& sigma_h, const DiscreteDisplacementField& u_h);

}  // namespace ncmixed
