#pragma once

#include "ncmixed/element.hpp"
#include "ncmixed/mesh.hpp"

#include <Eigen/Sparse>

#include <iosfwd>
#include <span>
#include <vector>

namespace ncmixed {

/// Global numbering of stress and displacement dofs.
///
/// Stress dofs: 9 per face (face index order), then 6 cell integrals per tet
/// (full variant only). Face normals and weight orderings come from global
/// vertex ids, so every element sees a shared face's dofs with the same sign
/// and order and the local-to-global map is a plain index lookup.
class DofMap {
 public:
  DofMap(const TetMesh& mesh, Variant v);

  Variant variant() const { return variant_; }
  int num_stress() const { return n_sigma_; }
  int num_displacement() const { return n_u_; }
  int local_stress_size() const { return num_stress_dofs(variant_); }
  int local_displacement_size() const { return num_displacement_dofs(variant_); }

  int face_offset(int f) const { return 9 * f; }
  /// First of the tet's 6 cell-moment dofs; -1 for the reduced variant.
  int cell_offset(int t) const;
  int displacement_offset(int t) const { return t * local_displacement_size(); }

  std::span<const int> stress_indices(int t) const;
  std::span<const int> displacement_indices(int t) const;

 private:
  Variant variant_;
  int n_faces_ = 0;
  int n_sigma_ = 0;
  int n_u_ = 0;
  std::vector<int> stress_l2g_;
  std::vector<int> disp_l2g_;
};

/// Mesh, dof map and per-element shape bases. Holds a reference to the mesh,
/// which must outlive the space.
class MixedSpace {
 public:
  MixedSpace(const TetMesh& mesh, Variant v);

  const TetMesh& mesh() const { return *mesh_; }
  Variant variant() const { return dofs_.variant(); }
  const DofMap& dofs() const { return dofs_; }
  const TetGeometry& geometry(int t) const { return geometry_[t]; }
  const StressShapeBasis& stress_basis(int t) const { return stress_[t]; }
  const DisplacementShapeBasis& displacement_basis(int t) const { return disp_[t]; }
  int num_tets() const { return mesh_->num_tets(); }
  /// Largest element dof-matrix condition number.
  double max_condition() const;

 private:
  const TetMesh* mesh_;
  DofMap dofs_;
  std::vector<TetGeometry> geometry_;
  std::vector<StressShapeBasis> stress_;
  std::vector<DisplacementShapeBasis> disp_;
};

/// A tau = (tau - lambda / (3 lambda + 2 mu) tr(tau) I) / (2 mu).
struct IsotropicCompliance {
  double lambda = 1.0;
  double mu = 1.0;

  IsotropicCompliance() = default;
  IsotropicCompliance(double lambda, double mu);

  /// C with A sigma : tau = sigma_c^T C tau_c over (xx, xy, xz, yy, yz, zz) components.
  Eigen::Matrix<double, 6, 6> component_matrix() const;
  /// Matrix of A in an orthonormal basis of Sym (off-diagonal units scaled by 1/sqrt 2).
  Eigen::Matrix<double, 6, 6> orthonormal_matrix() const;
};

Mat3 compliance_apply(const IsotropicCompliance& c, const Mat3& tau);
/// Inverse of compliance_apply: 2 mu eps + lambda tr(eps) I.
Mat3 stiffness_apply(const IsotropicCompliance& c, const Mat3& eps);

/// Blocks of [[A, B^T], [B, 0]] [sigma; u] = [G; F].
struct SaddleSystem {
  Eigen::SparseMatrix<double> A;  // n_sigma x n_sigma
  Eigen::SparseMatrix<double> B;  // n_u x n_sigma
  Eigen::VectorXd G;              // boundary displacement term
  Eigen::VectorXd F;              // load term

  int num_stress() const { return static_cast<int>(A.rows()); }
  int num_displacement() const { return static_cast<int>(B.rows()); }
  Eigen::SparseMatrix<double> matrix() const;
  Eigen::VectorXd rhs() const;
};

/// Element blocks before scattering.
struct ElementSystem {
  Eigen::MatrixXd A;  // local stress x local stress
  Eigen::MatrixXd B;  // local displacement x local stress
  Eigen::VectorXd F;
};

ElementSystem element_system(const TetGeometry& K, const StressShapeBasis& sb, const DisplacementShapeBasis& db,
                             const IsotropicCompliance& c, const VectorFunction& f);

/// Assembles the discrete Hellinger-Reissner system with load f (div sigma = f)
/// and boundary displacement g entering through sum over boundary faces of
/// the integral of (tau n) . g. Empty functions stand for zero data.
SaddleSystem assemble_system(const MixedSpace& space, const IsotropicCompliance& c, const VectorFunction& f,
                             const VectorFunction& g);

/// Matrix Market coordinate dump of the full saddle matrix (1-based), followed
/// by the right-hand side as a second array block.
void write_system(std::ostream& os, const SaddleSystem& sys);

}  // namespace ncmixed
