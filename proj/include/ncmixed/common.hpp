#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <utility>

namespace ncmixed {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Stress and displacement space variant.
enum class Variant { full, reduced };

inline const char* to_string(Variant v) { return v == Variant::full ? "full" : "reduced"; }
Variant parse_variant(const std::string& s);

/// Symmetric tensor components in (xx, xy, xz, yy, yz, zz) order.
inline constexpr std::array<std::pair<int, int>, 6> kSymIndex = {
    {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

/// Frobenius weight of each stored component (off-diagonals appear twice).
inline constexpr std::array<double, 6> kSymWeight = {1.0, 2.0, 2.0, 1.0, 2.0, 1.0};

inline Eigen::Matrix<double, 6, 1> to_components(const Mat3& t)
{
  Eigen::Matrix<double, 6, 1> c;
  for (int k = 0; k < 6; ++k)
    c[k] = t(kSymIndex[k].first, kSymIndex[k].second);
  return c;
}

inline Mat3 from_components(const Eigen::Matrix<double, 6, 1>& c)
{
  Mat3 t;
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kSymIndex[k];
    t(i, j) = c[k];
    t(j, i) = c[k];
  }
  return t;
}

// Error taxonomy. Callers that only care about failure catch ncmixed::Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class UnsupportedDegree : public Error {
 public:
  using Error::Error;
};

class UnisolvenceFailure : public Error {
 public:
  UnisolvenceFailure(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace ncmixed
