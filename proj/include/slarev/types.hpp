#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace slarev {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for malformed configuration or schema violations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spherical direction. Elevation is the polar angle measured from +z.
struct Direction {
  double elevation = 0.0;
  double azimuth = 0.0;

  Direction() = default;
  Direction(double el, double az) : elevation(el), azimuth(wrap_azimuth(az)) {
    if (!(el >= 0.0 && el <= kPi)) throw DomainError("elevation outside [0, pi]");
  }

  static double wrap_azimuth(double az) {
    double w = std::fmod(az, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    if (w >= 2.0 * kPi) w = 0.0;
    return w;
  }

  /// Direction of a non-zero Cartesian vector.
  static Direction from_cartesian(const Vector3d& v) {
    const double r = v.norm();
    if (!(r > 0.0)) throw DomainError("direction of zero vector");
    const double el = std::acos(std::clamp(v.z() / r, -1.0, 1.0));
    return Direction(el, std::atan2(v.y(), v.x()));
  }

  Vector3d unit() const {
    return {std::sin(elevation) * std::cos(azimuth), std::sin(elevation) * std::sin(azimuth),
            std::cos(elevation)};
  }

  Direction antipode() const { return Direction(kPi - elevation, azimuth + kPi); }
};

/// Spherical-harmonic channel (order n, degree m) with ACN linear index n^2 + n + m.
struct ModeIndex {
  int n = 0;
  int m = 0;

  constexpr ModeIndex() = default;
  constexpr ModeIndex(int order, int degree) : n(order), m(degree) {}

  constexpr bool valid() const { return n >= 0 && m >= -n && m <= n; }
  constexpr int acn() const { return n * n + n + m; }

  static ModeIndex from_acn(int index) {
    if (index < 0) throw DomainError("negative ACN index");
    const int n = static_cast<int>(std::floor(std::sqrt(static_cast<double>(index))));
    return {n, index - n * n - n};
  }
};

/// Number of SH channels up to and including `order`.
constexpr int num_channels(int order) { return (order + 1) * (order + 1); }

/// Angle between two directions, radians.
inline double angle_between(const Direction& a, const Direction& b) {
  return std::acos(std::clamp(a.unit().dot(b.unit()), -1.0, 1.0));
}

}  // namespace slarev
