#include "isoq/functionals.hpp"

#include "isoq/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace isoq {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double polygon_riesz(const Polygon2D& poly, const Eigen::Vector2d& y) {
  const Eigen::Matrix2Xd& v = poly.vertices;
  const Eigen::Index m = v.cols();
  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Vector2d p = v.col(i) - y;
    const Eigen::Vector2d d = v.col((i + 1) % m) - v.col(i);
    const double len = d.norm();
    const Eigen::Vector2d tau = d / len;
    const double h = tau.y() * p.x() - tau.x() * p.y();  // nu · p with nu = (tau_y, -tau_x)
    if (h == 0.0) continue;
    const double s1 = tau.dot(p);
    const double ah = std::abs(h);
    total += h * (std::asinh((s1 + len) / ah) - std::asinh(s1 / ah));
  }
  return total;
}

/// y -> ∫_E dx / |x - y| with the boundary rule built once. Points that
/// collide with a quadrature node are nudged by 1e-9.
class Potential {
 public:
  Potential(const ShapeRep& shape, int nodes) : shape_(shape) {
    if (shape.is_radial()) quad_ = boundary_quadrature(shape, nodes);
  }
  Potential(const ShapeRep& shape, const BoundaryQuadrature& quad) : shape_(shape), quad_(quad) {}

  double operator()(const Point& y) const {
    if (shape_.kind() == ShapeKind::Polygon2D) {
      return polygon_riesz(shape_.as_polygon(), Eigen::Vector2d(y));
    }
    const double scale = 1.0 / (shape_.dim() - 1);
    try {
      return scale * riesz_boundary(quad_, y);
    } catch (const ValidationError&) {
      Point nudged = y;
      nudged[0] += 1e-9;
      return scale * riesz_boundary(quad_, nudged);
    }
  }

 private:
  const ShapeRep& shape_;
  BoundaryQuadrature quad_;
};

CenterResult search_center(const Potential& potential, int n, const Point& base, double radius,
                           const EvalOptions& options, std::span<const Point> extra) {
  std::vector<Point> seeds{base};
  for (int i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Point s = base;
      s[i] += sign * 0.25 * radius;
      seeds.push_back(s);
    }
  }
  seeds.insert(seeds.end(), extra.begin(), extra.end());

  NelderMeadOptions nm;
  nm.initial_step = 0.1 * radius;
  nm.x_tolerance = options.center_tolerance * std::max(radius, 1e-300);
  nm.max_evaluations = options.max_evaluations;
  const Objective objective = [&](const Eigen::VectorXd& y) {
    return -potential(Point(y));
  };

  std::vector<NelderMeadResult> runs;
  runs.reserve(seeds.size());
  for (const Point& s : seeds) runs.push_back(nelder_mead(objective, Eigen::VectorXd(s), nm));

  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (-runs[i].value > -runs[best].value + 1e-14 * std::abs(runs[best].value)) best = i;
  }
  CenterResult result;
  result.center = Point(runs[best].x);
  result.gamma = -runs[best].value;
  result.restarts = static_cast<int>(runs.size());
  result.simplex_size = runs[best].simplex_size;
  result.converged = runs[best].converged;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    result.evaluations += runs[i].evaluations;
    if (i == best) continue;
    const double gap = result.gamma + runs[i].value;
    const double distance = (runs[i].x - runs[best].x).norm();
    if (gap <= options.multiplicity_tolerance && distance > 1e-4 * radius) {
      bool duplicate = false;
      for (const Point& p : result.other_maxima) {
        duplicate = duplicate || (Eigen::VectorXd(p) - runs[i].x).norm() <= 1e-4 * radius;
      }
      if (!duplicate) result.other_maxima.emplace_back(runs[i].x);
    }
  }
  return result;
}

/// unit = lambda (E - shift), so |unit| = omega_n and its barycenter is 0.
struct Gauge {
  Point shift;
  double lambda = 1.0;

  Point to_input(const Point& y) const { return shift + y / lambda; }
};

struct Prepared {
  Prepared(ShapeRep u, Gauge g, BoundaryQuadrature q, double p, int dim, int n_nodes)
      : unit(std::move(u)), gauge(std::move(g)), quad(std::move(q)), perimeter(p), n(dim),
        nodes(n_nodes), potential(unit, quad) {}
  Prepared(const Prepared&) = delete;

  ShapeRep unit;
  Gauge gauge;
  BoundaryQuadrature quad;
  double perimeter = 0.0;
  int n = 2;
  int nodes = kDefaultNodes;
  Potential potential;

  CenterResult center(const EvalOptions& options, std::span<const Point> extra = {}) const {
    return search_center(potential, n, zero_point(n), 1.0, options, extra);
  }
};

Prepared prepare(const ShapeRep& shape, const EvalOptions& options) {
  const Point b = barycenter(shape);
  auto [unit, lambda] = rescale_to_unit_volume(translate(shape, -b));
  BoundaryQuadrature quad = boundary_quadrature(unit, options.nodes);
  const double p = unit.kind() == ShapeKind::Polygon2D ? perimeter(unit) : quad.total_weight();
  const int n = unit.dim();
  return Prepared(std::move(unit), Gauge{b, lambda}, std::move(quad), p, n, options.nodes);
}

struct BetaParts {
  double identity = 0.0;  ///< P - (n-1) gamma
  double direct = 0.0;    ///< oscillation at the center
};

BetaParts beta_parts(const Prepared& prep, const CenterResult& center) {
  BetaParts parts;
  parts.identity = prep.perimeter - (prep.n - 1) * center.gamma;
  try {
    parts.direct = oscillation(prep.quad, center.center);
  } catch (const ValidationError&) {
    Point nudged = center.center;
    nudged[0] += 1e-9;
    parts.direct = oscillation(prep.quad, nudged);
  }
  return parts;
}

double gauge_sym_diff(const Prepared& prep, const Point& y) {
  return sym_diff_with_ball(prep.unit, BallSpec{y, 1.0}, prep.nodes);
}

NelderMeadOptions gauge_search_options(const EvalOptions& options) {
  NelderMeadOptions nm;
  nm.initial_step = 0.1;
  nm.x_tolerance = options.center_tolerance;
  nm.max_evaluations = options.max_evaluations;
  return nm;
}

FraenkelResult fraenkel_in_gauge(const Prepared& prep, const std::vector<Point>& seeds,
                                 const EvalOptions& options) {
  const Objective objective = [&](const Eigen::VectorXd& y) {
    return gauge_sym_diff(prep, Point(y));
  };
  FraenkelResult best;
  best.alpha = std::numeric_limits<double>::infinity();
  for (const Point& s : seeds) {
    const NelderMeadResult run = nelder_mead(objective, Eigen::VectorXd(s),
                                             gauge_search_options(options));
    if (run.value < best.alpha) {
      best.alpha = run.value;
      best.center = Point(run.x);
      best.converged = run.converged;
    }
  }
  return best;
}

double gauge_oscillation_exact(const Prepared& prep, const Point& y) {
  return std::max(0.0, prep.perimeter - (prep.n - 1) * prep.potential(y));
}

double combined_objective(const Prepared& prep, const Point& y) {
  return gauge_sym_diff(prep, y) + std::sqrt(2.0 * gauge_oscillation_exact(prep, y));
}

AsymmetryResult asymmetry_in_gauge(const Prepared& prep, const Point& y_alpha,
                                   const Point& y_gamma, const EvalOptions& options) {
  const Objective objective = [&](const Eigen::VectorXd& y) {
    return combined_objective(prep, Point(y));
  };
  AsymmetryResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (const Point& s : {y_alpha, y_gamma, zero_point(prep.n)}) {
    const NelderMeadResult run = nelder_mead(objective, Eigen::VectorXd(s),
                                             gauge_search_options(options));
    if (run.value < best.value) {
      best.value = run.value;
      best.center = Point(run.x);
      best.converged = run.converged;
    }
  }
  best.fraenkel_term = gauge_sym_diff(prep, best.center);
  best.oscillation_term = std::sqrt(2.0 * gauge_oscillation_exact(prep, best.center));
  best.upper_bound = std::min(combined_objective(prep, y_alpha), combined_objective(prep, y_gamma));
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------

double deficit(const ShapeRep& shape, int nodes) {
  const int n = shape.dim();
  const double r = volume_radius(volume(shape), n);
  const double p = perimeter(shape, nodes);
  return (p - unit_sphere_area(n) * std::pow(r, n - 1)) / std::pow(r, n - 1);
}

double riesz_boundary(const BoundaryQuadrature& q, const Point& y) {
  if (y.size() != q.dim()) throw ValidationError("riesz_boundary: point has wrong dimension");
  const Eigen::MatrixXd diff = q.points.colwise() - Eigen::VectorXd(y);
  const Eigen::RowVectorXd dist = diff.colwise().norm();
  if (dist.minCoeff() <= 1e-12) {
    throw ValidationError("riesz_boundary: evaluation point coincides with a boundary node");
  }
  const Eigen::RowVectorXd radial = q.normals.cwiseProduct(diff).colwise().sum();
  return (radial.array() / dist.array()).matrix().dot(q.weights);
}

double oscillation(const BoundaryQuadrature& q, const Point& y) {
  return q.total_weight() - riesz_boundary(q, y);
}

double riesz_potential(const ShapeRep& shape, const Point& y, int nodes) {
  if (shape.kind() == ShapeKind::Polygon2D) {
    if (y.size() != 2) throw ValidationError("riesz_potential: point has wrong dimension");
    return polygon_riesz(shape.as_polygon(), Eigen::Vector2d(y));
  }
  return riesz_boundary(boundary_quadrature(shape, nodes), y) / (shape.dim() - 1);
}

CenterResult gamma(const ShapeRep& shape, const EvalOptions& options,
                   std::span<const Point> extra_seeds) {
  const double radius = volume_radius(volume(shape), shape.dim());
  const Potential potential(shape, options.nodes);
  return search_center(potential, shape.dim(), barycenter(shape), radius, options, extra_seeds);
}

BetaResult beta(const ShapeRep& shape, const EvalOptions& options) {
  const Prepared prep = prepare(shape, options);
  BetaResult result;
  result.center_search = prep.center(options);
  const BetaParts parts = beta_parts(prep, result.center_search);
  result.quadrature_failure = parts.identity < -1e-8;
  result.clamped = parts.identity < 0.0;
  result.beta = std::sqrt(std::max(0.0, parts.identity));
  result.beta_direct = std::sqrt(std::max(0.0, parts.direct));
  result.residual = std::abs(parts.identity - parts.direct);
  result.center = prep.gauge.to_input(result.center_search.center);
  return result;
}

LocalBeta beta_squared_from(const ShapeRep& shape, const Point& start, const EvalOptions& options) {
  const Prepared prep = prepare(shape, options);
  NelderMeadOptions nm = gauge_search_options(options);
  nm.initial_step = 0.05;
  const Objective objective = [&](const Eigen::VectorXd& y) { return -prep.potential(Point(y)); };
  const Point y0 = prep.gauge.lambda * (start - prep.gauge.shift);
  const NelderMeadResult run = nelder_mead(objective, Eigen::VectorXd(y0), nm);
  LocalBeta out;
  out.beta2 = std::max(0.0, prep.perimeter + (prep.n - 1) * run.value);
  out.center = prep.gauge.to_input(Point(run.x));
  out.converged = run.converged;
  return out;
}

FraenkelResult fraenkel(const ShapeRep& shape, const EvalOptions& options) {
  const Prepared prep = prepare(shape, options);
  const CenterResult center = prep.center(options);
  FraenkelResult result = fraenkel_in_gauge(prep, {zero_point(prep.n), center.center}, options);
  result.center = prep.gauge.to_input(result.center);
  return result;
}

AsymmetryResult asymmetry_A(const ShapeRep& shape, const EvalOptions& options) {
  const Prepared prep = prepare(shape, options);
  const CenterResult center = prep.center(options);
  const FraenkelResult fr = fraenkel_in_gauge(prep, {zero_point(prep.n), center.center}, options);
  AsymmetryResult result = asymmetry_in_gauge(prep, fr.center, center.center, options);
  result.center = prep.gauge.to_input(result.center);
  return result;
}

double uniform_concavity_constant(int n) {
  return (1.0 / (4.0 * n)) * ((n - 1.0) / n) * std::pow(2.0, -(n + 1.0) / n);
}

double annulus_bound(double a, int n) {
  const double w = unit_ball_volume(n);
  const double e = (n - 1.0) / n;
  return n * w * (2.0 - std::pow(1.0 + a / w, e) - std::pow(std::max(0.0, 1.0 - a / w), e));
}

StrongPoincareResult strong_poincare_check(const ShapeRep& shape, const EvalOptions& options) {
  const Prepared prep = prepare(shape, options);
  const CenterResult center = prep.center(options);
  const int n = prep.n;
  const double w = unit_ball_volume(n);
  StrongPoincareResult r;
  r.lhs = std::max(0.0, beta_parts(prep, center).identity);
  r.deficit = prep.perimeter - n * w;
  r.a = 0.5 * gauge_sym_diff(prep, center.center);
  r.rhs = r.deficit + 8.0 * n * uniform_concavity_constant(n) / w * r.a * r.a;
  r.slack = r.lhs - r.rhs;
  r.center = prep.gauge.to_input(center.center);
  r.center_converged = center.converged;
  return r;
}

double center_stability_check(const ShapeRep& shape, double delta, const EvalOptions& options) {
  const int n = shape.dim();
  const double w = unit_ball_volume(n);
  if (std::abs(volume(shape) - w) > 1e-8 * w) {
    throw ValidationError("center_stability_check: shape must have |E| = omega_n");
  }
  const double sd = sym_diff_with_ball(shape, BallSpec{zero_point(n), 1.0}, options.nodes);
  if (!(sd < delta)) {
    std::ostringstream msg;
    msg << "center_stability_check: |E Δ B_1| = " << sd << " is not below delta = " << delta;
    throw ValidationError(msg.str());
  }
  return gamma(shape, options).center.norm();
}

FunctionalReport inequality_panel(const ShapeRep& shape, const EvalOptions& options) {
  const Prepared prep = prepare(shape, options);
  const int n = prep.n;
  const double w = unit_ball_volume(n);
  const Point origin = zero_point(n);

  CenterResult center = prep.center(options);
  const FraenkelResult fr = fraenkel_in_gauge(prep, {origin, center.center}, options);
  AsymmetryResult asym = asymmetry_in_gauge(prep, fr.center, center.center, options);

  // A's minimizer can expose a better Riesz center than the multistart did.
  if (gauge_oscillation_exact(prep, asym.center) <
      prep.perimeter - (n - 1) * center.gamma) {
    const Point extra[] = {asym.center};
    center = prep.center(options, extra);
  }
  const BetaParts parts = beta_parts(prep, center);

  FunctionalReport rep;
  rep.dim = n;
  rep.V = volume(shape);
  rep.P = perimeter(shape, options.nodes);
  rep.r = volume_radius(rep.V, n);
  rep.D = prep.perimeter - n * w;
  rep.gamma = center.gamma * std::pow(prep.gauge.lambda, -(n - 1));
  rep.y_star = prep.gauge.to_input(center.center);
  rep.quadrature_failure = parts.identity < -1e-8;
  rep.beta_clamped = parts.identity < 0.0;
  rep.beta = std::sqrt(std::max(0.0, parts.identity));
  rep.beta_direct = std::sqrt(std::max(0.0, parts.direct));
  rep.res_identity = std::abs(parts.identity - parts.direct);
  rep.alpha = fr.alpha;
  rep.y_alpha = prep.gauge.to_input(fr.center);
  rep.A = asym.value;
  rep.y_A = prep.gauge.to_input(asym.center);
  rep.A_upper = asym.upper_bound;
  rep.converged = center.converged && fr.converged && asym.converged;
  rep.center_multiple = center.multiple();

  const double b2 = rep.beta * rep.beta;
  rep.sym_diff_a = 0.5 * gauge_sym_diff(prep, center.center);
  rep.sp_lhs = b2;
  rep.sp_rhs = rep.D + 8.0 * n * uniform_concavity_constant(n) / w * rep.sym_diff_a * rep.sym_diff_a;
  rep.sp_slack = rep.sp_lhs - rep.sp_rhs;

  const bool has_deficit = rep.D >= 1e-12;
  rep.ratio_A2_D = has_deficit ? rep.A * rep.A / rep.D : kNaN;
  rep.ratio_b2_D = has_deficit ? b2 / rep.D : kNaN;
  rep.ratio_prop = (has_deficit && rep.beta > 1e-12) ? (rep.A + std::sqrt(rep.D)) / rep.beta : kNaN;
  return rep;
}

std::vector<std::string> panel_violations(const FunctionalReport& rep, const PanelTolerances& tol) {
  std::vector<std::string> out;
  auto fail = [&](const std::string& what, double lhs, double rhs) {
    std::ostringstream msg;
    msg.precision(10);
    msg << what << " (" << lhs << " vs " << rhs << ")";
    out.push_back(msg.str());
  };
  if (rep.A < std::sqrt(2.0) * rep.beta - tol.ordering) {
    fail("ordering A >= sqrt(2) beta", rep.A, std::sqrt(2.0) * rep.beta);
  }
  if (rep.sp_slack < -tol.strong_poincare) {
    fail("strong Poincaré beta^2 >= D + c a^2", rep.sp_lhs, rep.sp_rhs);
  }
  const double gauge_perimeter = rep.D + unit_sphere_area(rep.dim);
  if (rep.res_identity > tol.identity * gauge_perimeter) {
    fail("identity residual", rep.res_identity, tol.identity * gauge_perimeter);
  }
  if (rep.D < -tol.deficit) fail("deficit nonnegative", rep.D, 0.0);
  if (rep.quadrature_failure) fail("beta identity negative", -rep.beta, 0.0);
  return out;
}

namespace {

nlohmann::json number(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

nlohmann::json point_json(const Point& p) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

std::string fmt(double x) {
  if (!std::isfinite(x)) return "";
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

std::string fmt(const Point& p) {
  std::string out;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) out += ';';
    out += fmt(p[i]);
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const FunctionalReport& r) {
  return nlohmann::json{
      {"P", number(r.P)},
      {"V", number(r.V)},
      {"D", number(r.D)},
      {"gamma", number(r.gamma)},
      {"y_star", point_json(r.y_star)},
      {"beta", number(r.beta)},
      {"beta_direct", number(r.beta_direct)},
      {"alpha", number(r.alpha)},
      {"y_alpha", point_json(r.y_alpha)},
      {"A", number(r.A)},
      {"y_A", point_json(r.y_A)},
      {"res_identity", number(r.res_identity)},
      {"ratio_A2_D", number(r.ratio_A2_D)},
      {"ratio_b2_D", number(r.ratio_b2_D)},
      {"ratio_prop", number(r.ratio_prop)},
      {"sp_lhs", number(r.sp_lhs)},
      {"sp_rhs", number(r.sp_rhs)},
      {"r", number(r.r)},
      {"A_upper", number(r.A_upper)},
      {"sp_slack", number(r.sp_slack)},
      {"converged", r.converged},
      {"center_multiple", r.center_multiple},
      {"beta_clamped", r.beta_clamped},
      {"quadrature_failure", r.quadrature_failure},
  };
}

const std::vector<std::string>& report_csv_columns() {
  static const std::vector<std::string> columns{
      "P", "V", "D", "gamma", "y_star", "beta", "beta_direct", "alpha", "y_alpha", "A", "y_A",
      "res_identity", "ratio_A2_D", "ratio_b2_D", "ratio_prop", "sp_lhs", "sp_rhs"};
  return columns;
}

std::vector<std::string> report_csv_fields(const FunctionalReport& r) {
  return {fmt(r.P),          fmt(r.V),          fmt(r.D),          fmt(r.gamma),
          fmt(r.y_star),     fmt(r.beta),       fmt(r.beta_direct), fmt(r.alpha),
          fmt(r.y_alpha),    fmt(r.A),          fmt(r.y_A),        fmt(r.res_identity),
          fmt(r.ratio_A2_D), fmt(r.ratio_b2_D), fmt(r.ratio_prop), fmt(r.sp_lhs),
          fmt(r.sp_rhs)};
}

}  // namespace isoq
