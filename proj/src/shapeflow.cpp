#include "isoq/shapeflow.hpp"

#include "isoq/functionals.hpp"
#include "isoq/geometry.hpp"
#include "isoq/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace isoq {

void FlowConfig::validate() const {
  if (dim != 2 && dim != 3) throw ValidationError("flow: dimension must be 2 or 3");
  if (!(lambda > dim)) throw ValidationError("flow: lambda must exceed the dimension");
  if (!(R0 > 1.0)) throw ValidationError("flow: R0 must exceed 1");
  if (!(eps >= 0.0)) throw ValidationError("flow: eps must be nonnegative");
  if (!(step > 0.0) || !(tolerance > 0.0) || !(fd_step > 0.0)) {
    throw ValidationError("flow: step, tolerance and fd_step must be positive");
  }
  if (modes < 1 || max_iterations < 0 || nodes < kMinNodes) {
    throw ValidationError("flow: need modes >= 1, max_iterations >= 0, nodes >= 16");
  }
}

namespace {

double max_radius(const ShapeRep& shape) {
  switch (shape.kind()) {
    case ShapeKind::Polygon2D:
      return shape.as_polygon().vertices.colwise().norm().maxCoeff();
    case ShapeKind::RadialGraph2D: {
      const auto& r = shape.as_radial2d();
      const int m = 64 * r.u.modes() + 256;
      double best = 0.0;
      for (int j = 0; j < m; ++j) best = std::max(best, 1.0 + r.u.value(2.0 * kPi * j / m));
      return best + r.center.norm();
    }
    case ShapeKind::RadialGraph3D: {
      const auto& r = shape.as_radial3d();
      return 1.0 + r.u.values.maxCoeff() + r.center.norm();
    }
  }
  return 0.0;
}

Eigen::VectorXd pack(const FourierSeries& u) {
  Eigen::VectorXd c(1 + 2 * u.modes());
  c << u.a0, u.a, u.b;
  return c;
}

FourierSeries unpack(const Eigen::VectorXd& c) {
  const int k = static_cast<int>((c.size() - 1) / 2);
  FourierSeries u = FourierSeries::zero(k);
  u.a0 = c[0];
  u.a = c.segment(1, k);
  u.b = c.segment(1 + k, k);
  return u;
}

double isoperimetric_floor(double volume, int n) {
  return n * std::pow(unit_ball_volume(n), 1.0 / n) * std::pow(volume, (n - 1.0) / n);
}

/// Energy of coefficient vector c, or nullopt if the shape is invalid or
/// leaves B_{R0}.
std::optional<EnergyTerms> energy_at(const Eigen::VectorXd& c, const FlowConfig& config,
                                     const std::optional<Point>& warm) {
  try {
    return penalized_energy(ShapeRep::radial2d(unpack(c)), config, warm);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

/// Central differences of the smooth ingredients P, |E| and beta².
struct Partials {
  Eigen::VectorXd P, V, B;
};

Partials fd_partials(const Eigen::VectorXd& c, const FlowConfig& config,
                     const std::optional<Point>& warm, double h) {
  Partials d{Eigen::VectorXd(c.size()), Eigen::VectorXd(c.size()), Eigen::VectorXd(c.size())};
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    Eigen::VectorXd plus = c, minus = c;
    plus[i] += h;
    minus[i] -= h;
    const auto ep = energy_at(plus, config, warm);
    const auto em = energy_at(minus, config, warm);
    if (!ep || !em) throw NumericalError("flow: finite-difference probe left the admissible set");
    d.P[i] = (ep->P - em->P) / (2.0 * h);
    d.V[i] = (ep->volume - em->volume) / (2.0 * h);
    d.B[i] = (ep->beta2 - em->beta2) / (2.0 * h);
  }
  return d;
}

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

/// A term w |r| of the energy, with gradient of r.
struct Kink {
  double r;
  double w;
  const Eigen::VectorXd* grad;
};

std::vector<Kink> kinks(const EnergyTerms& e, const Partials& d, const FlowConfig& config) {
  std::vector<Kink> out{{e.volume - unit_ball_volume(config.dim), config.lambda, &d.V}};
  if (config.oscillation_term) out.push_back({e.beta2 - config.eps, 0.25, &d.B});
  return out;
}

/// Shortest base + M sigma with sigma in [-1, 1]^k, k <= 2.
Eigen::VectorXd shortest_in_box(const Eigen::VectorXd& base, const Eigen::MatrixXd& M) {
  auto clamp1 = [](double x) { return std::clamp(x, -1.0, 1.0); };
  auto best_along = [&](int j, const Eigen::VectorXd& b) -> Eigen::VectorXd {
    const double mm = M.col(j).squaredNorm();
    const double s = mm > 0 ? clamp1(-M.col(j).dot(b) / mm) : 0.0;
    return b + s * M.col(j);
  };
  if (M.cols() == 1) return best_along(0, base);
  const Eigen::Vector2d s = (M.transpose() * M).completeOrthogonalDecomposition().solve(-M.transpose() * base);
  if (s.cwiseAbs().maxCoeff() <= 1.0) return base + M * s;
  Eigen::VectorXd best;
  for (int j = 0; j < 2; ++j) {
    for (double fixed : {-1.0, 1.0}) {
      const Eigen::VectorXd g = best_along(1 - j, base + fixed * M.col(j));
      if (best.size() == 0 || g.squaredNorm() < best.squaredNorm()) best = g;
    }
  }
  return best;
}

/// Subgradient of the energy: sign(r) for each kink, except that kinks the
/// step -eta g would cross get their multiplier chosen in [-1, 1] so that g
/// is the shortest element of the local subdifferential.
Eigen::VectorXd descent_direction(const EnergyTerms& e, const Partials& d, const FlowConfig& config,
                                  double eta) {
  const std::vector<Kink> ks = kinks(e, d, config);
  std::vector<bool> active(ks.size(), false);
  Eigen::VectorXd g = d.P;
  for (const Kink& k : ks) g += k.w * sign(k.r) * *k.grad;
  for (std::size_t pass = 0; pass < ks.size(); ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (active[i]) continue;
      const double predicted = ks[i].r - eta * ks[i].grad->dot(g);
      if (ks[i].r == 0.0 || sign(predicted) != sign(ks[i].r)) active[i] = changed = true;
    }
    if (!changed) break;
    Eigen::VectorXd base = d.P;
    std::vector<int> cols;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (active[i]) cols.push_back(static_cast<int>(i));
      else base += ks[i].w * sign(ks[i].r) * *ks[i].grad;
    }
    Eigen::MatrixXd M(g.size(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) M.col(j) = ks[cols[j]].w * *ks[cols[j]].grad;
    g = shortest_in_box(base, M);
  }
  return g;
}

FlowState make_state(int iteration, const Eigen::VectorXd& c, const EnergyTerms& e,
                     const FlowConfig& config) {
  FlowState s;
  s.iteration = iteration;
  s.u = unpack(c);
  s.energy = e;
  s.deficit = deficit(ShapeRep::radial2d(s.u), config.nodes);
  s.isoperimetric_ok = e.P >= isoperimetric_floor(e.volume, 2) - 1e-6;
  return s;
}

}  // namespace

EnergyTerms penalized_energy(const ShapeRep& shape, const FlowConfig& config,
                             const std::optional<Point>& warm_start) {
  if (max_radius(shape) >= config.R0) {
    throw ValidationError("shape leaves the confinement ball B_R0");
  }
  const int n = shape.dim();
  EnergyTerms e;
  e.P = perimeter(shape, config.nodes);
  e.volume = volume(shape);
  e.volume_penalty = config.lambda * std::abs(e.volume - unit_ball_volume(n));
  if (config.oscillation_term) {
    EvalOptions options;
    options.nodes = config.nodes;
    if (warm_start) {
      const LocalBeta b = beta_squared_from(shape, *warm_start, options);
      e.beta2 = b.beta2;
      e.center = b.center;
    } else {
      const BetaResult b = beta(shape, options);
      e.beta2 = b.beta * b.beta;
      e.center = b.center;
    }
    e.oscillation_penalty = 0.25 * std::abs(e.beta2 - config.eps);
  } else {
    e.center = zero_point(n);
  }
  e.total = e.P + e.volume_penalty + e.oscillation_penalty;
  return e;
}

nlohmann::json to_json(const FlowState& s) {
  return nlohmann::json{
      {"iteration", s.iteration},
      {"energy", s.energy.total},
      {"P", s.energy.P},
      {"volPen", s.energy.volume_penalty},
      {"oscPen", s.energy.oscillation_penalty},
      {"stepNorm", s.step_norm},
      {"eta", s.eta},
      {"volume", s.energy.volume},
      {"beta2", s.energy.beta2},
      {"D", s.deficit},
      {"converged", s.converged},
      {"a0", s.u.a0},
      {"a", std::vector<double>(s.u.a.data(), s.u.a.data() + s.u.a.size())},
      {"b", std::vector<double>(s.u.b.data(), s.u.b.data() + s.u.b.size())},
  };
}

FlowResult minimize(const FourierSeries& init, const FlowConfig& config) {
  config.validate();
  if (config.dim != 2) throw ValidationError("flow: only planar Fourier shapes are supported");
  Eigen::VectorXd c = pack(resized(init, std::max(config.modes, init.modes())));

  const auto first = energy_at(c, config, std::nullopt);
  if (!first) throw ValidationError("flow: initial shape is invalid or not confined in B_R0");

  FlowResult result;
  EnergyTerms current = *first;
  double eta = config.step;
  result.trajectory.push_back(make_state(0, c, current, config));
  result.trajectory.back().eta = eta;

  int failures = 0;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const std::optional<Point> warm =
        config.oscillation_term ? std::optional<Point>(current.center) : std::nullopt;
    const Partials d = fd_partials(c, config, warm, config.fd_step);
    Eigen::VectorXd plain = d.P;
    for (const Kink& k : kinks(current, d, config)) plain += k.w * sign(k.r) * *k.grad;
    bool accepted = false;
    failures = 0;
    while (failures < config.max_failed_searches) {
      const Eigen::VectorXd g = descent_direction(current, d, config, eta);
      const double length = eta * g.norm();
      if (length < config.tolerance) {
        // stationary within the band of kinks this step size can reach;
        // a genuine stop only once the plain step is short as well
        if (eta * plain.norm() < config.tolerance) {
          result.converged = true;
          break;
        }
        eta *= 0.5;
        ++failures;
        continue;
      }
      const Eigen::VectorXd trial = c - eta * g;
      const auto e = energy_at(trial, config, warm);
      if (e && e->total < current.total) {
        c = trial;
        current = *e;
        result.trajectory.push_back(make_state(it, c, current, config));
        result.trajectory.back().step_norm = length;
        eta = std::min(1.5 * eta, config.step);
        result.trajectory.back().eta = eta;
        accepted = true;
        break;
      }
      eta *= 0.5;
      ++failures;
    }
    if (result.converged || !accepted) break;
  }
  result.failed_searches = failures;
  result.trajectory.back().converged = result.converged;
  return result;
}

double gradient_consistency(const FourierSeries& u, const FlowConfig& config, int directions,
                            std::uint64_t seed) {
  config.validate();
  const Eigen::VectorXd c = pack(resized(u, std::max(config.modes, u.modes())));
  const auto base = energy_at(c, config, std::nullopt);
  if (!base) throw ValidationError("gradient check: shape is invalid or not confined");
  const std::optional<Point> warm =
      config.oscillation_term ? std::optional<Point>(base->center) : std::nullopt;
  // the plain sign-convention gradient of the total energy
  const Partials d = fd_partials(c, config, warm, config.fd_step);
  Eigen::VectorXd g = d.P;
  for (const Kink& k : kinks(*base, d, config)) g += k.w * sign(k.r) * *k.grad;

  std::mt19937_64 rng = item_rng(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int d = 0; d < directions; ++d) {
    Eigen::VectorXd dir(c.size());
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = normal(rng);
    dir.normalize();
    const double h = 0.5 * config.fd_step;
    const auto ep = energy_at(c + h * dir, config, warm);
    const auto em = energy_at(c - h * dir, config, warm);
    if (!ep || !em) throw NumericalError("gradient check: probe left the admissible set");
    const double fd = (ep->total - em->total) / (2.0 * h);
    const double lin = g.dot(dir);
    const double scale = std::max({std::abs(fd), std::abs(lin), 1e-8});
    worst = std::max(worst, std::abs(fd - lin) / scale);
  }
  return worst;
}

FourierSeries uniqueness_seed(const UniquenessOptions& options, std::uint64_t index) {
  std::mt19937_64 rng = item_rng(options.seed, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> size(0.5, 1.0);
  FourierSeries u = FourierSeries::zero(options.max_mode);
  for (int k = options.min_mode; k <= options.max_mode; ++k) {
    u.a[k - 1] = normal(rng) / k;
    u.b[k - 1] = normal(rng) / k;
  }
  const int m = 64 * options.max_mode + 256;
  double sup = 0.0;
  for (int j = 0; j < m; ++j) sup = std::max(sup, std::abs(u.value(2.0 * kPi * j / m)));
  const double target = options.amplitude * size(rng);
  if (sup > 0) {
    u.a *= target / sup;
    u.b *= target / sup;
  }
  return u;
}

UniquenessReport ball_uniqueness_experiment(FlowConfig config, const UniquenessOptions& options) {
  config.oscillation_term = false;
  config.modes = std::max(config.modes, options.max_mode);
  config.validate();
  if (options.seeds < 1) throw ValidationError("uniqueness experiment needs at least one seed");
  if (options.min_mode < 1 || options.max_mode < options.min_mode) {
    throw ValidationError("uniqueness experiment needs 1 <= min_mode <= max_mode");
  }
  const double omega = unit_ball_volume(config.dim);

  UniquenessReport report;
  report.runs = parallel_map(static_cast<std::size_t>(options.seeds), options.threads,
                             [&](std::size_t i) {
    const FlowResult flow = minimize(uniqueness_seed(options, i), config);
    const FlowState& last = flow.final_state();
    UniquenessRun run;
    run.seed_index = i;
    run.converged = flow.converged;
    run.iterations = last.iteration;
    run.final_energy = last.energy.total;
    run.final_deficit = last.deficit;
    run.final_volume_error = std::abs(last.energy.volume - omega);
    run.min_energy = std::numeric_limits<double>::infinity();
    for (const FlowState& s : flow.trajectory) {
      run.min_energy = std::min(run.min_energy, s.energy.total);
      run.isoperimetric_ok = run.isoperimetric_ok && s.isoperimetric_ok;
    }
    return run;
  });

  int good = 0;
  report.min_energy = std::numeric_limits<double>::infinity();
  for (const UniquenessRun& r : report.runs) {
    if (r.final_deficit <= 1e-3 && r.final_volume_error <= 1e-3) ++good;
    report.max_volume_error = std::max(report.max_volume_error, r.final_volume_error);
    report.max_deficit = std::max(report.max_deficit, r.final_deficit);
    report.min_energy = std::min(report.min_energy, r.min_energy);
  }
  report.fraction_converged = static_cast<double>(good) / report.runs.size();
  report.energy_bound_ok = report.min_energy >= unit_sphere_area(config.dim) - 1e-6;
  return report;
}

nlohmann::json to_json(const UniquenessReport& report) {
  nlohmann::json runs = nlohmann::json::array();
  for (const UniquenessRun& r : report.runs) {
    runs.push_back({{"seed_index", r.seed_index},
                    {"converged", r.converged},
                    {"iterations", r.iterations},
                    {"final_energy", r.final_energy},
                    {"final_D", r.final_deficit},
                    {"final_volume_error", r.final_volume_error},
                    {"min_energy", r.min_energy},
                    {"isoperimetric_ok", r.isoperimetric_ok}});
  }
  return nlohmann::json{{"runs", runs},
                        {"fraction_converged", report.fraction_converged},
                        {"max_volume_error", report.max_volume_error},
                        {"max_D", report.max_deficit},
                        {"min_energy", report.min_energy},
                        {"energy_bound_ok", report.energy_bound_ok}};
}

}  // namespace isoq
