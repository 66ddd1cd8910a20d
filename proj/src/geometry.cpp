#include "isoq/geometry.hpp"

#include "isoq/quadrature_rules.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace isoq {
namespace {

double cross2(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
  return u.x() * v.y() - u.y() * v.x();
}

/// rho = 1 + u and rho' at theta_j = 2 pi j / n.
void sample_radius(const FourierSeries& u, int n, Eigen::VectorXd& rho, Eigen::VectorXd& drho) {
  rho.resize(n);
  drho.resize(n);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * j / n;
    rho[j] = 1.0 + u.value(t);
    drho[j] = u.derivative(t);
  }
}

BoundaryQuadrature polygon_quadrature(const Polygon2D& poly, int nodes) {
  const Eigen::Matrix2Xd& v = poly.vertices;
  const Eigen::Index m = v.cols();
  Eigen::VectorXd lengths(m);
  for (Eigen::Index i = 0; i < m; ++i) lengths[i] = (v.col((i + 1) % m) - v.col(i)).norm();
  const double total = lengths.sum();
  const double panel_budget = static_cast<double>(nodes) / kPanelOrder;

  std::vector<int> panels(m);
  int count = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    panels[i] = std::max(1, static_cast<int>(std::lround(panel_budget * lengths[i] / total)));
    count += panels[i] * kPanelOrder;
  }

  const GaussRule& rule = gauss_legendre(kPanelOrder);
  BoundaryQuadrature q{Eigen::MatrixXd(2, count), Eigen::MatrixXd(2, count),
                       Eigen::VectorXd(count)};
  int k = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Vector2d p = v.col(i);
    const Eigen::Vector2d d = v.col((i + 1) % m) - p;
    const Eigen::Vector2d normal = Eigen::Vector2d(d.y(), -d.x()) / lengths[i];
    const double h = 1.0 / panels[i];
    for (int s = 0; s < panels[i]; ++s) {
      for (int g = 0; g < kPanelOrder; ++g) {
        const double t = h * (s + 0.5 * (1.0 + rule.nodes[g]));
        q.points.col(k) = p + t * d;
        q.normals.col(k) = normal;
        q.weights[k] = 0.5 * h * rule.weights[g] * lengths[i];
        ++k;
      }
    }
  }
  return q;
}

BoundaryQuadrature radial2d_quadrature(const RadialGraph2D& g, int nodes) {
  Eigen::VectorXd rho, drho;
  sample_radius(g.u, nodes, rho, drho);
  BoundaryQuadrature q{Eigen::MatrixXd(2, nodes), Eigen::MatrixXd(2, nodes),
                       Eigen::VectorXd(nodes)};
  const double dt = 2.0 * kPi / nodes;
  for (int j = 0; j < nodes; ++j) {
    const double t = j * dt;
    const Eigen::Vector2d z(std::cos(t), std::sin(t));
    const Eigen::Vector2d tau(-z.y(), z.x());
    const double speed = std::hypot(rho[j], drho[j]);
    q.points.col(j) = g.center + rho[j] * z;
    q.normals.col(j) = (rho[j] * z - drho[j] * tau) / speed;
    q.weights[j] = speed * dt;
  }
  return q;
}

BoundaryQuadrature radial3d_quadrature(const RadialGraph3D& g) {
  const SphericalGrid& grid = g.u;
  const GridGradient grad = grid.gradient();
  const int n = grid.nlat * grid.nlon;
  BoundaryQuadrature q{Eigen::MatrixXd(3, n), Eigen::MatrixXd(3, n), Eigen::VectorXd(n)};
  const GaussRule& rule = gauss_legendre(grid.nlat);
  int k = 0;
  for (int i = 0; i < grid.nlat; ++i) {
    const double ct = rule.nodes[i];
    const double st = std::sqrt(1.0 - ct * ct);
    const double w = rule.weights[i] * 2.0 * kPi / grid.nlon;
    for (int j = 0; j < grid.nlon; ++j, ++k) {
      const double phi = grid.longitude(j);
      const double cp = std::cos(phi), sp = std::sin(phi);
      const Eigen::Vector3d z(st * cp, st * sp, ct);
      const Eigen::Vector3d e_theta(ct * cp, ct * sp, -st);
      const Eigen::Vector3d e_phi(-sp, cp, 0.0);
      const double rho = 1.0 + grid.values(i, j);
      const Eigen::Vector3d tangential = grad.d_theta(i, j) * e_theta + grad.d_phi(i, j) * e_phi;
      const double speed = std::sqrt(rho * rho + tangential.squaredNorm());
      q.points.col(k) = g.center + rho * z;
      q.normals.col(k) = (rho * z - tangential) / speed;
      q.weights[k] = w * rho * speed;
    }
  }
  return q;
}

/// Signed area of (disk of radius r at the origin) ∩ (triangle 0, a, b).
double disk_triangle_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double r) {
  const Eigen::Vector2d d = b - a;
  const double qa = d.squaredNorm();
  const double qb = 2.0 * a.dot(d);
  const double qc = a.squaredNorm() - r * r;
  std::array<double, 4> ts{0.0, 0.0, 0.0, 1.0};
  int nt = 1;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    // numerically stable roots
    const double qq = -0.5 * (qb + std::copysign(s, qb));
    double t1 = qq / qa, t2 = (qq != 0.0) ? qc / qq : t1;
    if (t1 > t2) std::swap(t1, t2);
    if (t1 > 0.0 && t1 < 1.0) ts[nt++] = t1;
    if (t2 > 0.0 && t2 < 1.0) ts[nt++] = t2;
  }
  ts[nt++] = 1.0;
  double area = 0.0;
  for (int i = 0; i + 1 < nt; ++i) {
    const Eigen::Vector2d p = a + ts[i] * d;
    const Eigen::Vector2d q = a + ts[i + 1] * d;
    const Eigen::Vector2d mid = 0.5 * (p + q);
    if (mid.squaredNorm() <= r * r) {
      area += 0.5 * cross2(p, q);
    } else {
      area += 0.5 * r * r * std::atan2(cross2(p, q), p.dot(q));
    }
  }
  return area;
}

double polygon_disk_intersection(const Polygon2D& poly, const Eigen::Vector2d& c, double r) {
  const Eigen::Matrix2Xd& v = poly.vertices;
  const Eigen::Index m = v.cols();
  double area = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    area += disk_triangle_area(v.col(i) - c, v.col((i + 1) % m) - c, r);
  }
  return area;
}

/// Ray from the shape center in direction d: E occupies [0, rho], the ball
/// [t1, t2]. Returns the n-dimensional radial measure of the overlap.
struct RayOverlap {
  double rho, t1, t2, disc;

  double measure(int n) const {
    if (disc <= 0.0) return 0.0;
    const double lo = std::max(0.0, t1);
    const double hi = std::min(rho, t2);
    if (hi <= lo) return 0.0;
    return n == 2 ? 0.5 * (hi * hi - lo * lo) : (hi * hi * hi - lo * lo * lo) / 3.0;
  }
  /// Functions whose sign changes mark kinks of measure().
  std::array<double, 5> kinks() const { return {rho - t2, rho - t1, t1, t2, disc}; }
};

RayOverlap ray_overlap(double rho, const Eigen::Ref<const Eigen::VectorXd>& dir,
                       const Eigen::Ref<const Eigen::VectorXd>& q, double r) {
  const double dq = dir.dot(q);
  const double disc = dq * dq - q.squaredNorm() + r * r;
  const double s = std::sqrt(std::max(disc, 0.0));
  return {rho, dq - s, dq + s, disc};
}

double radial2d_ball_intersection(const RadialGraph2D& g, const Eigen::Vector2d& y, double r,
                                  int cells) {
  const Eigen::Vector2d q = y - g.center;
  auto overlap_at = [&](double t) {
    const Eigen::Vector2d dir(std::cos(t), std::sin(t));
    return ray_overlap(1.0 + g.u.value(t), dir, q, r);
  };
  const GaussRule& rule = gauss_legendre(kPanelOrder);
  auto integrate = [&](double a, double b) {
    double s = 0.0;
    for (int k = 0; k < kPanelOrder; ++k) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[k];
      s += rule.weights[k] * overlap_at(t).measure(2);
    }
    return 0.5 * (b - a) * s;
  };

  const double h = 2.0 * kPi / cells;
  double total = 0.0;
  std::array<double, 5> left = overlap_at(0.0).kinks();
  std::vector<double> breaks;
  for (int c = 0; c < cells; ++c) {
    const double a = c * h, b = (c + 1) * h;
    const std::array<double, 5> right = overlap_at(b).kinks();
    breaks.assign({a, b});
    for (int k = 0; k < 5; ++k) {
      if ((left[k] < 0.0) == (right[k] < 0.0)) continue;
      double lo = a, hi = b;
      const bool lo_negative = left[k] < 0.0;
      for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((overlap_at(mid).kinks()[k] < 0.0) == lo_negative ? lo : hi) = mid;
      }
      breaks.push_back(0.5 * (lo + hi));
    }
    std::sort(breaks.begin(), breaks.end());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      if (breaks[i + 1] > breaks[i]) total += integrate(breaks[i], breaks[i + 1]);
    }
    left = right;
  }
  return total;
}

double radial3d_ball_intersection(const RadialGraph3D& g, const Eigen::Vector3d& y, double r) {
  const SphericalGrid& grid = g.u;
  const Eigen::Vector3d q = y - g.center;
  double total = 0.0;
  for (int i = 0; i < grid.nlat; ++i) {
    const double w = grid.weight(i);
    for (int j = 0; j < grid.nlon; ++j) {
      const Eigen::Vector3d dir = grid.direction(i, j);
      total += w * ray_overlap(1.0 + grid.values(i, j), dir, q, r).measure(3);
    }
  }
  return total;
}

}  // namespace

double volume(const ShapeRep& shape) {
  switch (shape.kind()) {
    case ShapeKind::Polygon2D: {
      const Eigen::Matrix2Xd& v = shape.as_polygon().vertices;
      double twice = 0.0;
      for (Eigen::Index i = 0; i < v.cols(); ++i) {
        twice += cross2(v.col(i), v.col((i + 1) % v.cols()));
      }
      return 0.5 * twice;
    }
    case ShapeKind::RadialGraph2D: {
      // (1/2) ∫ (1+u)^2 dθ by Parseval
      const FourierSeries& u = shape.as_radial2d().u;
      const double c = 1.0 + u.a0;
      return kPi * c * c + 0.5 * kPi * (u.a.squaredNorm() + u.b.squaredNorm());
    }
    case ShapeKind::RadialGraph3D: {
      const SphericalGrid& g = shape.as_radial3d().u;
      double v = 0.0;
      for (int i = 0; i < g.nlat; ++i) {
        v += g.weight(i) * (1.0 + g.values.row(i).array()).cube().sum() / 3.0;
      }
      return v;
    }
  }
  return 0.0;
}

double perimeter(const ShapeRep& shape, int nodes) {
  if (shape.kind() == ShapeKind::Polygon2D) {
    const Eigen::Matrix2Xd& v = shape.as_polygon().vertices;
    double p = 0.0;
    for (Eigen::Index i = 0; i < v.cols(); ++i) {
      p += (v.col((i + 1) % v.cols()) - v.col(i)).norm();
    }
    return p;
  }
  return boundary_quadrature(shape, nodes).total_weight();
}

BoundaryQuadrature boundary_quadrature(const ShapeRep& shape, int nodes) {
  if (nodes < kMinNodes) {
    throw ValidationError("boundary quadrature needs at least " + std::to_string(kMinNodes) +
                          " nodes, got " + std::to_string(nodes));
  }
  switch (shape.kind()) {
    case ShapeKind::Polygon2D: return polygon_quadrature(shape.as_polygon(), nodes);
    case ShapeKind::RadialGraph2D: return radial2d_quadrature(shape.as_radial2d(), nodes);
    case ShapeKind::RadialGraph3D: return radial3d_quadrature(shape.as_radial3d());
  }
  throw ValidationError("unknown shape kind");
}

Point barycenter(const ShapeRep& shape) {
  switch (shape.kind()) {
    case ShapeKind::Polygon2D: {
      const Eigen::Matrix2Xd& v = shape.as_polygon().vertices;
      Eigen::Vector2d c = Eigen::Vector2d::Zero();
      double twice = 0.0;
      for (Eigen::Index i = 0; i < v.cols(); ++i) {
        const Eigen::Vector2d p = v.col(i), q = v.col((i + 1) % v.cols());
        const double w = cross2(p, q);
        twice += w;
        c += w * (p + q);
      }
      return c / (3.0 * twice);
    }
    case ShapeKind::RadialGraph2D: {
      const RadialGraph2D& g = shape.as_radial2d();
      // ∫ (1+u)^3 / 3 z dθ; the integrand is a trigonometric polynomial of
      // degree 3K + 1, integrated exactly by this many trapezoid points
      const int m = 4 * g.u.modes() + 16;
      Eigen::Vector2d s = Eigen::Vector2d::Zero();
      for (int j = 0; j < m; ++j) {
        const double t = 2.0 * kPi * j / m;
        const double rho = 1.0 + g.u.value(t);
        s += rho * rho * rho / 3.0 * Eigen::Vector2d(std::cos(t), std::sin(t));
      }
      s *= 2.0 * kPi / m;
      return Point(g.center + s / volume(shape));
    }
    case ShapeKind::RadialGraph3D: {
      const RadialGraph3D& g = shape.as_radial3d();
      Eigen::Vector3d s = Eigen::Vector3d::Zero();
      for (int i = 0; i < g.u.nlat; ++i) {
        for (int j = 0; j < g.u.nlon; ++j) {
          const double rho = 1.0 + g.u.values(i, j);
          s += g.u.weight(i) * 0.25 * rho * rho * rho * rho * g.u.direction(i, j);
        }
      }
      return Point(g.center + s / volume(shape));
    }
  }
  return Point();
}

ShapeRep scale(const ShapeRep& shape, double lambda) {
  if (!(lambda > 0)) throw ValidationError("scale factor must be positive");
  switch (shape.kind()) {
    case ShapeKind::Polygon2D:
      return ShapeRep::polygon(lambda * shape.as_polygon().vertices);
    case ShapeKind::RadialGraph2D: {
      const RadialGraph2D& g = shape.as_radial2d();
      FourierSeries u = g.u;
      u.a0 = lambda * (1.0 + u.a0) - 1.0;
      u.a *= lambda;
      u.b *= lambda;
      return ShapeRep::radial2d(std::move(u), lambda * g.center);
    }
    case ShapeKind::RadialGraph3D: {
      const RadialGraph3D& g = shape.as_radial3d();
      SphericalGrid u = g.u;
      u.values = (lambda * (1.0 + u.values.array()) - 1.0).matrix();
      return ShapeRep::radial3d(std::move(u), lambda * g.center);
    }
  }
  throw ValidationError("unknown shape kind");
}

std::pair<ShapeRep, double> rescale_to_unit_volume(const ShapeRep& shape) {
  const double v = volume(shape);
  if (!(v > 0)) throw ValidationError("shape volume must be positive");
  const double lambda = std::pow(unit_ball_volume(shape.dim()) / v, 1.0 / shape.dim());
  return {scale(shape, lambda), lambda};
}

ShapeRep translate(const ShapeRep& shape, const Point& v) {
  if (v.size() != shape.dim()) throw ValidationError("translation has wrong dimension");
  switch (shape.kind()) {
    case ShapeKind::Polygon2D:
      return ShapeRep::polygon(shape.as_polygon().vertices.colwise() + Eigen::Vector2d(v));
    case ShapeKind::RadialGraph2D: {
      const RadialGraph2D& g = shape.as_radial2d();
      return ShapeRep::radial2d(g.u, g.center + Eigen::Vector2d(v));
    }
    case ShapeKind::RadialGraph3D: {
      const RadialGraph3D& g = shape.as_radial3d();
      return ShapeRep::radial3d(g.u, g.center + Eigen::Vector3d(v));
    }
  }
  throw ValidationError("unknown shape kind");
}

ShapeRep polygonize(const ShapeRep& shape, int vertices, double tolerance) {
  switch (shape.kind()) {
    case ShapeKind::Polygon2D: return shape;
    case ShapeKind::RadialGraph3D:
      throw ValidationError("polygonize: only planar shapes can be converted to polygons");
    case ShapeKind::RadialGraph2D: break;
  }
  if (vertices < 3) throw ValidationError("polygonize: need at least 3 vertices");
  const RadialGraph2D& g = shape.as_radial2d();
  Eigen::Matrix2Xd v(2, vertices);
  for (int j = 0; j < vertices; ++j) {
    const double t = 2.0 * kPi * j / vertices;
    v.col(j) = g.center + (1.0 + g.u.value(t)) * Eigen::Vector2d(std::cos(t), std::sin(t));
  }
  ShapeRep poly = ShapeRep::polygon(std::move(v));
  const double exact = perimeter(shape, std::max(vertices, kDefaultNodes));
  const double error = std::abs(perimeter(poly) - exact) / exact;
  if (error > tolerance) {
    std::ostringstream msg;
    msg << "polygonize: " << vertices << " vertices give relative perimeter error " << error
        << " > tolerance " << tolerance;
    throw ValidationError(msg.str());
  }
  return poly;
}

BallSpec volume_matched_ball(const ShapeRep& shape, const Point& center) {
  return BallSpec{center, volume_radius(volume(shape), shape.dim())};
}

double intersection_with_ball(const ShapeRep& shape, const BallSpec& ball, int nodes) {
  if (!(ball.radius > 0)) throw ValidationError("ball radius must be positive");
  if (ball.center.size() != shape.dim()) throw ValidationError("ball center has wrong dimension");
  switch (shape.kind()) {
    case ShapeKind::Polygon2D:
      return polygon_disk_intersection(shape.as_polygon(), ball.center, ball.radius);
    case ShapeKind::RadialGraph2D:
      return radial2d_ball_intersection(shape.as_radial2d(), ball.center, ball.radius,
                                        std::max(nodes, kMinNodes));
    case ShapeKind::RadialGraph3D:
      return radial3d_ball_intersection(shape.as_radial3d(), ball.center, ball.radius);
  }
  return 0.0;
}

double sym_diff_with_ball(const ShapeRep& shape, const BallSpec& ball, int nodes) {
  const int n = shape.dim();
  const double ball_volume = unit_ball_volume(n) * std::pow(ball.radius, n);
  const double sd = volume(shape) + ball_volume - 2.0 * intersection_with_ball(shape, ball, nodes);
  return std::max(sd, 0.0);
}

}  // namespace isoq
