#pragma once

#include "isoq/common.hpp"

#include <string>
#include <variant>

namespace isoq {

/// u(theta) = a0 + sum_{k=1..K} a_k cos(k theta) + b_k sin(k theta).
struct FourierSeries {
  double a0 = 0.0;
  Eigen::VectorXd a;  ///< a[k-1] multiplies cos(k theta)
  Eigen::VectorXd b;  ///< b[k-1] multiplies sin(k theta)

  int modes() const { return static_cast<int>(a.size()); }
  double value(double theta) const;
  double derivative(double theta) const;

  /// u ≡ 0 with room for `modes` coefficients.
  static FourierSeries zero(int modes = 0);
  /// u = c cos(k theta) + s sin(k theta).
  static FourierSeries single_mode(int k, double c, double s = 0.0);
};

/// Pads (or trims) so that a.size() == b.size() == modes.
FourierSeries resized(const FourierSeries& u, int modes);

/// Tangential gradient of a gridded function, split into the colatitude
/// component and the longitude component (already divided by sin(theta)).
struct GridGradient {
  Eigen::MatrixXd d_theta;
  Eigen::MatrixXd d_phi;
};

/// Values of u on a latitude-longitude grid: Gauss-Legendre nodes in
/// cos(colatitude) (north first) times a uniform longitude grid.
struct SphericalGrid {
  int nlat = 0;
  int nlon = 0;
  Eigen::MatrixXd values;  ///< nlat x nlon

  double colatitude(int i) const;
  double longitude(int j) const { return 2.0 * kPi * j / nlon; }
  /// Area weight of node (i, j) on the unit sphere; sums to 4 pi.
  double weight(int i) const;
  Eigen::Vector3d direction(int i, int j) const;

  /// Centered differences; across the poles the stencil continues along the
  /// opposite meridian, so nlon must be even.
  GridGradient gradient() const;
  /// Linear in colatitude, linear in longitude.
  double interpolate(double theta, double phi) const;

  static SphericalGrid zero(int nlat, int nlon);
};

struct Polygon2D {
  Eigen::Matrix2Xd vertices;  ///< counterclockwise simple loop, not repeated
};

/// Star-shaped planar set: boundary center + (1 + u(theta)) (cos theta, sin theta).
struct RadialGraph2D {
  FourierSeries u;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
};

/// Star-shaped set in R^3: boundary center + (1 + u(z)) z, z on the unit sphere.
struct RadialGraph3D {
  SphericalGrid u;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
};

enum class ShapeKind { Polygon2D, RadialGraph2D, RadialGraph3D };

std::string kind_name(ShapeKind kind);

/// A validated set E. Immutable once built; the factories enforce the
/// representation invariants (simple ccw polygon, 1 + u > 0).
class ShapeRep {
 public:
  using Rep = std::variant<Polygon2D, RadialGraph2D, RadialGraph3D>;

  /// Clockwise loops are reversed. Rejects fewer than three vertices,
  /// zero area and self-intersections.
  static ShapeRep polygon(Eigen::Matrix2Xd vertices);
  static ShapeRep radial2d(FourierSeries u,
                           const Eigen::Vector2d& center = Eigen::Vector2d::Zero());
  static ShapeRep radial3d(SphericalGrid u,
                           const Eigen::Vector3d& center = Eigen::Vector3d::Zero());

  ShapeKind kind() const { return static_cast<ShapeKind>(rep_.index()); }
  int dim() const { return kind() == ShapeKind::RadialGraph3D ? 3 : 2; }
  bool is_radial() const { return kind() != ShapeKind::Polygon2D; }
  const Rep& rep() const { return rep_; }

  const Polygon2D& as_polygon() const { return std::get<Polygon2D>(rep_); }
  const RadialGraph2D& as_radial2d() const { return std::get<RadialGraph2D>(rep_); }
  const RadialGraph3D& as_radial3d() const { return std::get<RadialGraph3D>(rep_); }

 private:
  explicit ShapeRep(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

/// Unit ball as a radial graph (u ≡ 0). For n = 3 the grid size is given.
ShapeRep unit_ball(int n = 2, int nlat = 32, int nlon = 64);
/// Ball of radius r centered at c (radial graph).
ShapeRep ball(const Point& c, double r, int nlat = 32, int nlon = 64);
/// Regular polygon with the given area, one vertex on the positive x axis.
ShapeRep regular_polygon(int sides, double area);
/// Axis-aligned w x h rectangle centered at the origin.
ShapeRep rectangle(double width, double height);

}  // namespace isoq
