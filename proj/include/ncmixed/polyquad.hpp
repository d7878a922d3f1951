#pragma once

#include "ncmixed/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace ncmixed {

/// Barycentric monomial lambda^alpha on a d-simplex (alpha has d+1 entries).
struct BaryMonomial {
  std::vector<int> alpha;

  int dim() const { return static_cast<int>(alpha.size()) - 1; }
  int degree() const;
};

/// Exact integral of a barycentric monomial over a simplex of the given measure:
///   alpha_0! ... alpha_d! d! / (|alpha| + d)! * measure
double bary_integral(const BaryMonomial& m, double measure = 1.0);

/// Quadrature rule on the d-simplex in barycentric coordinates.
/// Weights sum to 1; multiply by the simplex measure to integrate.
struct QuadRule {
  int dim = 0;
  int exact_degree = 0;
  std::vector<std::array<double, 4>> points;  // d+1 barycentric coordinates used
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Rule exact for all polynomials of total degree <= degree on a triangle (d=2)
/// or tetrahedron (d=3). Degrees are rounded up to {1, 2, 4, 6, 8, 10}; larger
/// requests throw UnsupportedDegree. The returned reference is to a static table.
const QuadRule& simplex_quadrature(int d, int degree);

/// Local polynomial coordinates of an element: xi = (x - centroid) / h.
struct ElementFrame {
  Vec3 centroid = Vec3::Zero();
  double h = 1.0;

  Vec3 to_local(const Vec3& x) const { return (x - centroid) / h; }
};

ElementFrame make_frame(const std::array<Vec3, 4>& tet);

inline constexpr int kNumScalarQuadratics = 10;
inline constexpr int kNumScalarLinears = 4;
inline constexpr int kNumTensorQuadratics = 6 * kNumScalarQuadratics;
inline constexpr int kNumVectorLinears = 3 * kNumScalarLinears;

/// Exponents of the scalar monomials 1, x, y, z, x^2, xy, xz, y^2, yz, z^2.
inline constexpr std::array<std::array<int, 3>, 10> kMonomialExponents = {
    {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 0, 0},
     {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}}};

std::array<double, 10> quadratic_monomials(const Vec3& xi);

/// d/dxi_k of each quadratic monomial at xi; row k.
Eigen::Matrix<double, 3, 10> quadratic_monomial_gradients(const Vec3& xi);

/// Index of the monomial with the given exponents, or -1 if not quadratic.
int monomial_index(const std::array<int, 3>& exps);

/// Scalar quadratic in element coordinates; coeffs.size() must be 10.
double eval_poly(std::span<const double> coeffs, const ElementFrame& frame, const Vec3& x);

/// Symmetric tensor field with 60 coefficients, component-major: comp * 10 + monomial.
Mat3 eval_sym_tensor(std::span<const double> coeffs, const ElementFrame& frame, const Vec3& x);

/// Row-wise divergence of a 60-coefficient tensor field at x.
Vec3 eval_sym_tensor_div(std::span<const double> coeffs, const ElementFrame& frame, const Vec3& x);

/// Linear vector field with 12 coefficients, component-major: comp * 4 + {1, xi_x, xi_y, xi_z}.
Vec3 eval_linear_vector(std::span<const double> coeffs, const ElementFrame& frame, const Vec3& x);

/// Map a barycentric point on a tet (4 coords) or triangle (3 coords) to space.
Vec3 bary_to_point(const std::array<double, 4>& bary, std::span<const Vec3> simplex);

}  // namespace ncmixed
