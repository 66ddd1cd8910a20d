#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace isoq {

/// Point or vector in R^n, n in {2, 3}. Fixed max size, so no heap traffic.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

inline constexpr double kPi = std::numbers::pi;

/// Default boundary node count for planar shapes.
inline constexpr int kDefaultNodes = 4096;

/// Invalid input: bad shape, violated precondition, malformed file.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver its contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// omega_n = |B_1| in R^n.
inline double unit_ball_volume(int n) {
  switch (n) {
    case 2: return kPi;
    case 3: return 4.0 * kPi / 3.0;
    default: throw ValidationError("dimension must be 2 or 3");
  }
}

/// P(B_1) = n * omega_n.
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

/// Radius of the ball with the given volume.
inline double volume_radius(double volume, int n) {
  return std::pow(volume / unit_ball_volume(n), 1.0 / n);
}

inline Point make_point(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

inline Point make_point(double x, double y, double z) {
  Point p(3);
  p << x, y, z;
  return p;
}

inline Point zero_point(int n) { return Point::Zero(n); }

}  // namespace isoq
