#pragma once

#include "isoq/common.hpp"
#include "isoq/shape.hpp"

#include <utility>

namespace isoq {

/// Sampled reduced boundary: nodes x_i, outward unit normals nu_i and
/// weights w_i (arc length in 2D, area in 3D) stored column-wise.
struct BoundaryQuadrature {
  Eigen::MatrixXd points;   ///< dim x N
  Eigen::MatrixXd normals;  ///< dim x N
  Eigen::VectorXd weights;  ///< N

  int dim() const { return static_cast<int>(points.rows()); }
  int size() const { return static_cast<int>(weights.size()); }
  /// Sum of weights, i.e. the perimeter seen by this rule.
  double total_weight() const { return weights.sum(); }
  /// Sum of w_i nu_i; vanishes for a closed boundary.
  Point flux() const { return normals * weights; }
};

struct BallSpec {
  Point center;
  double radius = 1.0;
};

/// Minimum node count accepted by boundary_quadrature.
inline constexpr int kMinNodes = 16;
/// Gauss points per polygon panel.
inline constexpr int kPanelOrder = 8;

double volume(const ShapeRep& shape);

/// Exact for polygons; trapezoidal (spectral) for radial graphs in 2D;
/// node count ignored for 3D grids, which carry their own resolution.
double perimeter(const ShapeRep& shape, int nodes = kDefaultNodes);

/// Polygons: composite Gauss-Legendre panels on each edge, panel count
/// proportional to edge length. Radial graphs: uniform parameter rule in 2D,
/// Gauss-Legendre x uniform product rule on the 3D grid.
BoundaryQuadrature boundary_quadrature(const ShapeRep& shape, int nodes = kDefaultNodes);

Point barycenter(const ShapeRep& shape);

/// Scaling about the coordinate origin.
ShapeRep scale(const ShapeRep& shape, double lambda);

/// Returns (lambda E, lambda) with lambda = (omega_n / |E|)^{1/n}.
std::pair<ShapeRep, double> rescale_to_unit_volume(const ShapeRep& shape);

/// Exact for every representation: radial graphs carry their own center.
ShapeRep translate(const ShapeRep& shape, const Point& v);

/// Dense polygon through `vertices` boundary samples of a planar shape.
/// Rejects when the polygon's perimeter departs from the source perimeter
/// by more than `tolerance` (relative).
ShapeRep polygonize(const ShapeRep& shape, int vertices, double tolerance = 1e-6);

/// The volume-matched ball B_r(y), r = (|E| / omega_n)^{1/n}.
BallSpec volume_matched_ball(const ShapeRep& shape, const Point& center);

/// |E ∩ B|. Polygons: exact circular-segment clipping. Planar radial graphs:
/// ray integration from the shape's center with breakpoints at every kink.
/// 3D grids: the same ray integrand on the grid's product rule.
double intersection_with_ball(const ShapeRep& shape, const BallSpec& ball,
                              int nodes = kDefaultNodes);

/// |E Δ B| = |E| + |B| - 2 |E ∩ B|.
double sym_diff_with_ball(const ShapeRep& shape, const BallSpec& ball,
                          int nodes = kDefaultNodes);

}  // namespace isoq
