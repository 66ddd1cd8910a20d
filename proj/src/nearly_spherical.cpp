#include "isoq/nearly_spherical.hpp"

#include "isoq/geometry.hpp"
#include "isoq/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace isoq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::pair<double, double> angles(const Point& z) {
  const double theta = std::acos(std::clamp(z[2] / z.norm(), -1.0, 1.0));
  return {theta, std::atan2(z[1], z[0])};
}

SphericalGrid with_values(const SphericalGrid& g, Eigen::MatrixXd values) {
  return SphericalGrid{g.nlat, g.nlon, std::move(values)};
}

int sup_samples(const FourierSeries& u) { return 64 * u.modes() + 256; }

}  // namespace

SphericalFunction::SphericalFunction(FourierSeries u) : data_(std::move(u)) {}

SphericalFunction::SphericalFunction(SphericalGrid u) : data_(std::move(u)) {
  grad_ = grid().gradient();
}

double SphericalFunction::value(const Point& z) const {
  if (is_fourier()) return fourier().value(std::atan2(z[1], z[0]));
  const auto [theta, phi] = angles(z);
  return grid().interpolate(theta, phi);
}

Point SphericalFunction::tangential_gradient(const Point& z) const {
  if (is_fourier()) {
    const double theta = std::atan2(z[1], z[0]);
    return fourier().derivative(theta) * make_point(-std::sin(theta), std::cos(theta));
  }
  const auto [theta, phi] = angles(z);
  const double dt = with_values(grid(), grad_.d_theta).interpolate(theta, phi);
  const double dp = with_values(grid(), grad_.d_phi).interpolate(theta, phi);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  return dt * make_point(ct * cp, ct * sp, -st) + dp * make_point(-sp, cp, 0.0);
}

ShapeRep SphericalFunction::shape() const {
  if (is_fourier()) return ShapeRep::radial2d(fourier());
  return ShapeRep::radial3d(grid());
}

SobolevNorms sobolev_norms(const SphericalFunction& u) {
  SobolevNorms out;
  if (u.is_fourier()) {
    const FourierSeries& f = u.fourier();
    const Eigen::ArrayXd power = f.a.array().square() + f.b.array().square();
    const Eigen::ArrayXd k2 = Eigen::ArrayXd::LinSpaced(f.modes(), 1, f.modes()).square();
    out.L2 = 2.0 * kPi * f.a0 * f.a0 + kPi * power.sum();
    out.H1semi = kPi * (k2 * power).sum();
    const int m = sup_samples(f);
    double su = 0.0, sd = 0.0;
    for (int j = 0; j < m; ++j) {
      const double theta = 2.0 * kPi * j / m;
      su = std::max(su, std::abs(f.value(theta)));
      sd = std::max(sd, std::abs(f.derivative(theta)));
    }
    out.W1inf = su + sd;
    return out;
  }
  const SphericalGrid& g = u.grid();
  const GridGradient grad = g.gradient();
  double su = 0.0, sd = 0.0;
  for (int i = 0; i < g.nlat; ++i) {
    const double w = g.weight(i);
    for (int j = 0; j < g.nlon; ++j) {
      const double v = g.values(i, j);
      const double d2 = grad.d_theta(i, j) * grad.d_theta(i, j) + grad.d_phi(i, j) * grad.d_phi(i, j);
      out.L2 += w * v * v;
      out.H1semi += w * d2;
      su = std::max(su, std::abs(v));
      sd = std::max(sd, std::sqrt(d2));
    }
  }
  out.W1inf = su + sd;
  return out;
}

Point normal_vector(const SphericalFunction& u, const Point& z) {
  const Point zn = z.normalized();
  const Point nu = (1.0 + u.value(zn)) * zn - u.tangential_gradient(zn);
  return nu.normalized();
}

namespace {

SphericalFunction shifted(const SphericalFunction& u, double c) {
  if (u.is_fourier()) {
    FourierSeries f = u.fourier();
    f.a0 += c;
    return SphericalFunction(std::move(f));
  }
  SphericalGrid g = u.grid();
  g.values.array() += c;
  return SphericalFunction(std::move(g));
}

/// d|E|/dc for u -> u + c: ∫ (1 + u + c)^{n-1} dσ.
double volume_slope(const SphericalFunction& u) {
  if (u.is_fourier()) return 2.0 * kPi * (1.0 + u.fourier().a0);
  const SphericalGrid& g = u.grid();
  double s = 0.0;
  for (int i = 0; i < g.nlat; ++i) s += g.weight(i) * (1.0 + g.values.row(i).array()).square().sum();
  return s;
}

/// Constant-mode Newton for |E| = omega_n. Returns (u, iterations).
std::pair<SphericalFunction, int> fix_volume(SphericalFunction u, const NormalizeOptions& options,
                                             double w1inf) {
  const double target = unit_ball_volume(u.dim());
  for (int it = 0; it < options.max_newton; ++it) {
    double v;
    try {
      v = volume(u.shape());
    } catch (const ValidationError&) {
      throw ValidationError("normalization diverged (1 + u <= 0); ‖u‖_W1inf = " +
                            std::to_string(w1inf));
    }
    const double f = v - target;
    if (std::abs(f) <= options.volume_tolerance * target) return {std::move(u), it};
    const double slope = volume_slope(u);
    if (!(slope > 0)) {
      throw ValidationError("normalization diverged; ‖u‖_W1inf = " + std::to_string(w1inf));
    }
    u = shifted(u, -f / slope);
  }
  throw ValidationError("volume Newton did not converge in " + std::to_string(options.max_newton) +
                        " steps; ‖u‖_W1inf = " + std::to_string(w1inf));
}

/// Radial function of the same planar set seen from b, with `modes` modes.
FourierSeries resample_about(const FourierSeries& u, const Eigen::Vector2d& b, int modes) {
  const int m = 4 * modes + 64;
  Eigen::VectorXd rho(m);
  for (int j = 0; j < m; ++j) {
    const double theta = 2.0 * kPi * j / m;
    const Eigen::Vector2d e(std::cos(theta), std::sin(theta));
    // boundary parameter phi whose point, seen from b, lies in direction e
    double phi = theta;
    Eigen::Vector2d q;
    for (int it = 0; it < 50; ++it) {
      const double r = 1.0 + u.value(phi), dr = u.derivative(phi);
      const Eigen::Vector2d ep(std::cos(phi), std::sin(phi)), et(-std::sin(phi), std::cos(phi));
      q = r * ep - b;
      const Eigen::Vector2d dq = dr * ep + r * et;
      const double g = std::atan2(e.x() * q.y() - e.y() * q.x(), e.dot(q));
      const double dg = (q.x() * dq.y() - q.y() * dq.x()) / q.squaredNorm();
      const double step = g / dg;
      phi -= step;
      if (std::abs(step) < 1e-15) break;
    }
    q = (1.0 + u.value(phi)) * Eigen::Vector2d(std::cos(phi), std::sin(phi)) - b;
    rho[j] = e.dot(q);
  }
  FourierSeries out = FourierSeries::zero(modes);
  out.a0 = rho.mean() - 1.0;
  for (int k = 1; k <= modes; ++k) {
    double sa = 0.0, sb = 0.0;
    for (int j = 0; j < m; ++j) {
      const double theta = 2.0 * kPi * j / m;
      sa += rho[j] * std::cos(k * theta);
      sb += rho[j] * std::sin(k * theta);
    }
    out.a[k - 1] = 2.0 * sa / m;
    out.b[k - 1] = 2.0 * sb / m;
  }
  return out;
}

SphericalGrid resample_about(const SphericalFunction& u, const Eigen::Vector3d& b) {
  SphericalGrid out = u.grid();
  for (int i = 0; i < out.nlat; ++i) {
    for (int j = 0; j < out.nlon; ++j) {
      const Eigen::Vector3d z = out.direction(i, j);
      const double bz = b.dot(z), bb = b.squaredNorm();
      double rho = 1.0 + out.values(i, j);
      for (int it = 0; it < 60; ++it) {
        const Eigen::Vector3d x = b + rho * z;
        const double r = 1.0 + u.value(Point(x.normalized()));
        const double next = -bz + std::sqrt(bz * bz - bb + r * r);
        const bool done = std::abs(next - rho) < 1e-15;
        rho = next;
        if (done) break;
      }
      out.values(i, j) = rho - 1.0;
    }
  }
  return out;
}

}  // namespace

NormalizedSphericalSet normalize(const SphericalFunction& u, const NormalizeOptions& options) {
  u.shape();  // validates 1 + u > 0
  const double w1inf = sobolev_norms(u).W1inf;
  const int modes = u.is_fourier() ? u.fourier().modes() + options.extra_modes : 0;

  SphericalFunction cur = u;
  int newton = 0;
  for (int rec = 0; rec <= options.max_recenter; ++rec) {
    auto [fixed, its] = fix_volume(std::move(cur), options, w1inf);
    cur = std::move(fixed);
    newton += its;
    const ShapeRep shape = cur.shape();
    const Point b = barycenter(shape);
    if (b.norm() <= options.barycenter_tolerance) {
      const double w = sobolev_norms(cur).W1inf;
      return NormalizedSphericalSet{cur, volume(shape), b, newton, rec, w, w <= options.eps0};
    }
    if (rec == options.max_recenter) break;
    if (cur.is_fourier()) {
      cur = SphericalFunction(resample_about(cur.fourier(), Eigen::Vector2d(b), modes));
    } else {
      cur = SphericalFunction(resample_about(cur, Eigen::Vector3d(b)));
    }
  }
  throw NumericalError("recentering did not reach the barycenter tolerance");
}

FugledeRatio fuglede_ratio(const NormalizedSphericalSet& set, int nodes) {
  FugledeRatio out;
  out.D = deficit(set.u.shape(), nodes);
  out.norm2 = sobolev_norms(set.u).W12();
  out.ratio = out.norm2 > 1e-300 ? out.D / out.norm2 : kNaN;
  out.small = set.small;
  return out;
}

NormalizedSphericalSet mode_set(int k, double t, const NormalizeOptions& options) {
  return normalize(SphericalFunction(FourierSeries::single_mode(k, t)), options);
}

double mode_ratio_limit(int k) { return (k * k - 1.0) / (2.0 * (1.0 + k * k)); }

SharpnessTable sharpness_family(const std::vector<double>& t_values, const EvalOptions& options,
                                int threads) {
  SharpnessTable table;
  table.rows = parallel_map(t_values.size(), threads, [&](std::size_t i) {
    const double t = t_values[i];
    const FunctionalReport r = inequality_panel(mode_set(2, t).u.shape(), options);
    return SharpnessRow{t, r.alpha, r.D, r.beta * r.beta, r.A * r.A, r.ratio_A2_D};
  });
  if (table.rows.size() >= 2) {
    Eigen::MatrixXd X(table.rows.size(), 2);
    Eigen::VectorXd y(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = std::log(table.rows[i].alpha);
      y[i] = std::log(table.rows[i].D);
    }
    table.slope = X.colPivHouseholderQr().solve(y)[1];
  } else {
    table.slope = kNaN;
  }
  return table;
}

ChainCheck fuglede_chain_check(const NormalizedSphericalSet& set, const EvalOptions& options) {
  const FunctionalReport r = inequality_panel(set.u.shape(), options);
  ChainCheck out;
  out.beta2 = r.beta * r.beta;
  out.A2 = r.A * r.A;
  out.D = r.D;
  out.gamma = r.gamma;
  if (set.u.is_fourier()) {
    out.gamma_origin = 2.0 * kPi * (1.0 + set.u.fourier().a0);
  } else {
    const SphericalGrid& g = set.u.grid();
    for (int i = 0; i < g.nlat; ++i) {
      out.gamma_origin += 0.5 * g.weight(i) * (1.0 + g.values.row(i).array()).square().sum();
    }
  }
  out.ratio_A2_D = r.ratio_A2_D;
  out.ratio_b2_D = r.ratio_b2_D;
  out.ordered = out.beta2 <= out.A2 + 1e-12;
  return out;
}

FourierSeries random_fourier(const RandomFamilyOptions& options, std::uint64_t index) {
  if (options.min_mode < 1 || options.max_mode < options.min_mode) {
    throw ValidationError("random family needs 1 <= min_mode <= max_mode");
  }
  std::mt19937_64 rng = item_rng(options.seed, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  FourierSeries u = FourierSeries::zero(options.max_mode);
  for (int k = options.min_mode; k <= options.max_mode; ++k) {
    const double sd = 1.0 / (static_cast<double>(k) * k);
    u.a[k - 1] = sd * normal(rng);
    u.b[k - 1] = sd * normal(rng);
  }
  const double w = sobolev_norms(SphericalFunction(u)).W1inf;
  if (w > 0) {
    u.a *= options.amplitude / w;
    u.b *= options.amplitude / w;
  }
  return u;
}

FugledeExperiment fuglede_experiment(int samples, const RandomFamilyOptions& family, int nodes,
                                     int threads) {
  if (samples < 1) throw ValidationError("need at least one sample");
  FugledeExperiment out;
  out.samples = parallel_map(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
    const NormalizedSphericalSet set = normalize(SphericalFunction(random_fourier(family, i)));
    return FugledeSample{i, fuglede_ratio(set, nodes)};
  });
  out.infimum = std::numeric_limits<double>::infinity();
  for (const FugledeSample& s : out.samples) {
    if (std::isfinite(s.ratio.ratio) && s.ratio.ratio < out.infimum) {
      out.infimum = s.ratio.ratio;
      out.argmin = s.index;
    }
  }
  if (!std::isfinite(out.infimum)) out.infimum = kNaN;
  return out;
}

}  // namespace isoq
