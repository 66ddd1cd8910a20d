#include "isoq/shape.hpp"

#include "isoq/quadrature_rules.hpp"

#include <algorithm>
#include <cmath>

namespace isoq {

double FourierSeries::value(double theta) const {
  // cos/sin of k*theta by repeated rotation
  const double c1 = std::cos(theta), s1 = std::sin(theta);
  double ck = 1.0, sk = 0.0, sum = a0;
  for (int k = 1; k <= modes(); ++k) {
    const double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
    sum += a[k - 1] * ck + b[k - 1] * sk;
  }
  return sum;
}

double FourierSeries::derivative(double theta) const {
  const double c1 = std::cos(theta), s1 = std::sin(theta);
  double ck = 1.0, sk = 0.0, sum = 0.0;
  for (int k = 1; k <= modes(); ++k) {
    const double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
    sum += k * (b[k - 1] * ck - a[k - 1] * sk);
  }
  return sum;
}

FourierSeries FourierSeries::zero(int modes) {
  return FourierSeries{0.0, Eigen::VectorXd::Zero(modes), Eigen::VectorXd::Zero(modes)};
}

FourierSeries FourierSeries::single_mode(int k, double c, double s) {
  if (k < 1) throw ValidationError("Fourier mode index must be >= 1");
  FourierSeries u = zero(k);
  u.a[k - 1] = c;
  u.b[k - 1] = s;
  return u;
}

FourierSeries resized(const FourierSeries& u, int modes) {
  FourierSeries out = FourierSeries::zero(modes);
  out.a0 = u.a0;
  const int keep = std::min(modes, u.modes());
  out.a.head(keep) = u.a.head(keep);
  out.b.head(keep) = u.b.head(keep);
  return out;
}

// ---------------------------------------------------------------------------

double SphericalGrid::colatitude(int i) const {
  return std::acos(gauss_legendre(nlat).nodes[i]);
}

double SphericalGrid::weight(int i) const {
  return gauss_legendre(nlat).weights[i] * 2.0 * kPi / nlon;
}

Eigen::Vector3d SphericalGrid::direction(int i, int j) const {
  const double ct = gauss_legendre(nlat).nodes[i];
  const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  const double phi = longitude(j);
  return {st * std::cos(phi), st * std::sin(phi), ct};
}

SphericalGrid SphericalGrid::zero(int nlat, int nlon) {
  return SphericalGrid{nlat, nlon, Eigen::MatrixXd::Zero(nlat, nlon)};
}

GridGradient SphericalGrid::gradient() const {
  GridGradient g{Eigen::MatrixXd(nlat, nlon), Eigen::MatrixXd(nlat, nlon)};
  const int half = nlon / 2;
  const double dphi = 2.0 * kPi / nlon;
  auto theta = [&](int i) {
    if (i < 0) return -colatitude(0);
    if (i >= nlat) return 2.0 * kPi - colatitude(nlat - 1);
    return colatitude(i);
  };
  auto value = [&](int i, int j) {
    if (i < 0) return values(0, (j + half) % nlon);
    if (i >= nlat) return values(nlat - 1, (j + half) % nlon);
    return values(i, j);
  };
  for (int i = 0; i < nlat; ++i) {
    const double h1 = theta(i) - theta(i - 1);
    const double h2 = theta(i + 1) - theta(i);
    const double cm = -h2 / (h1 * (h1 + h2));
    const double c0 = (h2 - h1) / (h1 * h2);
    const double cp = h1 / (h2 * (h1 + h2));
    const double st = std::sin(theta(i));
    for (int j = 0; j < nlon; ++j) {
      g.d_theta(i, j) = cm * value(i - 1, j) + c0 * value(i, j) + cp * value(i + 1, j);
      const double up = values(i, (j + 1) % nlon);
      const double um = values(i, (j + nlon - 1) % nlon);
      g.d_phi(i, j) = (up - um) / (2.0 * dphi * st);
    }
  }
  return g;
}

double SphericalGrid::interpolate(double theta, double phi) const {
  const double dphi = 2.0 * kPi / nlon;
  phi = std::fmod(phi, 2.0 * kPi);
  if (phi < 0) phi += 2.0 * kPi;
  auto row_value = [&](int i, double p) {
    if (i < 0 || i >= nlat) {
      i = i < 0 ? 0 : nlat - 1;
      p = std::fmod(p + kPi, 2.0 * kPi);
    }
    const double t = p / dphi;
    const int j0 = static_cast<int>(std::floor(t)) % nlon;
    const double f = t - std::floor(t);
    return (1.0 - f) * values(i, j0) + f * values(i, (j0 + 1) % nlon);
  };
  auto theta_ext = [&](int i) {
    if (i < 0) return -colatitude(0);
    if (i >= nlat) return 2.0 * kPi - colatitude(nlat - 1);
    return colatitude(i);
  };
  int lo = -1;
  while (lo < nlat && theta_ext(lo + 1) < theta) ++lo;
  const int hi = lo + 1;
  const double t0 = theta_ext(lo), t1 = theta_ext(hi);
  const double f = (theta - t0) / (t1 - t0);
  return (1.0 - f) * row_value(lo, phi) + f * row_value(hi, phi);
}

// ---------------------------------------------------------------------------

std::string kind_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Polygon2D: return "polygon2d";
    case ShapeKind::RadialGraph2D: return "radial2d";
    case ShapeKind::RadialGraph3D: return "radial3d";
  }
  return "unknown";
}

namespace {

double cross(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
  return u.x() * v.y() - u.y() * v.x();
}

bool on_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r) {
  return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
         std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
}

bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                        const Eigen::Vector2d& q1, const Eigen::Vector2d& q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

}  // namespace

ShapeRep ShapeRep::polygon(Eigen::Matrix2Xd vertices) {
  const Eigen::Index m = vertices.cols();
  if (m < 3) throw ValidationError("polygon needs at least 3 vertices");
  if (!vertices.allFinite()) throw ValidationError("polygon has non-finite coordinates");
  double twice_area = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    twice_area += cross(vertices.col(i), vertices.col((i + 1) % m));
  }
  double scale = vertices.cwiseAbs().maxCoeff();
  if (std::abs(twice_area) <= 1e-14 * scale * scale) {
    throw ValidationError("degenerate polygon (zero area)");
  }
  if (twice_area < 0) vertices = vertices.rowwise().reverse().eval();

  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Vector2d p1 = vertices.col(i), p2 = vertices.col((i + 1) % m);
    if ((p2 - p1).norm() == 0.0) throw ValidationError("polygon has repeated vertex");
    // bounding box of edge i, for a cheap reject
    const double xmin = std::min(p1.x(), p2.x()), xmax = std::max(p1.x(), p2.x());
    const double ymin = std::min(p1.y(), p2.y()), ymax = std::max(p1.y(), p2.y());
    for (Eigen::Index j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;
      const Eigen::Vector2d q1 = vertices.col(j), q2 = vertices.col((j + 1) % m);
      if (std::max(q1.x(), q2.x()) < xmin || std::min(q1.x(), q2.x()) > xmax ||
          std::max(q1.y(), q2.y()) < ymin || std::min(q1.y(), q2.y()) > ymax) {
        continue;
      }
      if (segments_intersect(p1, p2, q1, q2)) {
        throw ValidationError("polygon is not simple: edges " + std::to_string(i) +
                              " and " + std::to_string(j) + " intersect");
      }
    }
  }
  return ShapeRep(Polygon2D{std::move(vertices)});
}

ShapeRep ShapeRep::radial2d(FourierSeries u, const Eigen::Vector2d& center) {
  if (u.a.size() != u.b.size()) throw ValidationError("Fourier a and b lengths differ");
  if (!std::isfinite(u.a0) || !u.a.allFinite() || !u.b.allFinite() || !center.allFinite()) {
    throw ValidationError("non-finite Fourier coefficient");
  }
  const int samples = 16 * u.modes() + 64;
  for (int j = 0; j < samples; ++j) {
    if (1.0 + u.value(2.0 * kPi * j / samples) <= 0.0) {
      throw ValidationError("radial graph violates 1 + u > 0");
    }
  }
  return ShapeRep(RadialGraph2D{std::move(u), center});
}

ShapeRep ShapeRep::radial3d(SphericalGrid u, const Eigen::Vector3d& center) {
  if (u.nlat < 2 || u.nlon < 4 || u.nlon % 2 != 0) {
    throw ValidationError("spherical grid needs nlat >= 2 and even nlon >= 4");
  }
  if (u.values.rows() != u.nlat || u.values.cols() != u.nlon) {
    throw ValidationError("spherical grid values do not match nlat x nlon");
  }
  if (!u.values.allFinite() || !center.allFinite()) {
    throw ValidationError("non-finite grid value");
  }
  if ((u.values.array() <= -1.0).any()) {
    throw ValidationError("radial graph violates 1 + u > 0");
  }
  return ShapeRep(RadialGraph3D{std::move(u), center});
}

ShapeRep unit_ball(int n, int nlat, int nlon) { return ball(zero_point(n), 1.0, nlat, nlon); }

ShapeRep ball(const Point& c, double r, int nlat, int nlon) {
  if (!(r > 0)) throw ValidationError("ball radius must be positive");
  if (c.size() == 2) {
    FourierSeries u = FourierSeries::zero();
    u.a0 = r - 1.0;
    return ShapeRep::radial2d(u, c);
  }
  if (c.size() == 3) {
    SphericalGrid g = SphericalGrid::zero(nlat, nlon);
    g.values.setConstant(r - 1.0);
    return ShapeRep::radial3d(g, c);
  }
  throw ValidationError("dimension must be 2 or 3");
}

ShapeRep regular_polygon(int sides, double area) {
  if (sides < 3) throw ValidationError("regular polygon needs >= 3 sides");
  const double radius = std::sqrt(2.0 * area / (sides * std::sin(2.0 * kPi / sides)));
  Eigen::Matrix2Xd v(2, sides);
  for (int k = 0; k < sides; ++k) {
    const double t = 2.0 * kPi * k / sides;
    v.col(k) << radius * std::cos(t), radius * std::sin(t);
  }
  return ShapeRep::polygon(std::move(v));
}

ShapeRep rectangle(double width, double height) {
  Eigen::Matrix2Xd v(2, 4);
  const double w = 0.5 * width, h = 0.5 * height;
  v << -w, w, w, -w,
       -h, -h, h, h;
  return ShapeRep::polygon(std::move(v));
}

}  // namespace isoq
