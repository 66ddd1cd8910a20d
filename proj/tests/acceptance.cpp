// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance 3 5        run the listed ones
// Exit status is 0 only if every selected criterion passes.

#include "oracles.hpp"

#include "isoq/corpus.hpp"
#include "isoq/functionals.hpp"
#include "isoq/geometry.hpp"
#include "isoq/harness.hpp"
#include "isoq/nearly_spherical.hpp"
#include "isoq/parallel.hpp"
#include "isoq/shapeflow.hpp"

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace isoq;
using nlohmann::json;

namespace {

/// Collects failed checks; the first few go into the report line.
struct Outcome {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string num(double x, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

bool within(double x, double target, double rel) { return std::abs(x - target) <= rel * std::abs(target); }

int threads() { return resolve_threads(0); }

const std::vector<CorpusRow>& corpus_rows(int nodes) {
  static std::map<int, std::vector<CorpusRow>> cache;
  auto it = cache.find(nodes);
  if (it == cache.end()) {
    json spec = default_corpus_spec();
    spec["nodes"] = nodes;
    it = cache.emplace(nodes, run_corpus(expand_corpus(spec), {}, {}, threads())).first;
  }
  return it->second;
}

const CorpusRow& row(const std::vector<CorpusRow>& rows, const std::string& id) {
  for (const CorpusRow& r : rows)
    if (r.id == id) return r;
  throw std::runtime_error("corpus has no row " + id);
}

void require_reports(Outcome& o, const std::vector<CorpusRow>& rows) {
  for (const CorpusRow& r : rows)
    o.check(r.report.has_value(), r.id + " failed: " + r.message);
}

void identity_suite(Outcome& o) {
  const std::vector<CorpusRow>& rows = corpus_rows(4096);
  o.check(rows.size() >= 30, "corpus has fewer than 30 shapes");
  require_reports(o, rows);
  double worst = 0.0;
  for (const CorpusRow& r : rows) {
    if (!r.report) continue;
    // residual and P in the |E| = omega gauge, where the report lives
    const double rel = r.report->res_identity / (r.report->D + 2 * kPi);
    worst = std::max(worst, rel);
    o.check(rel <= 1e-6, r.id + ": identity residual " + num(rel) + " P");
  }
  const FunctionalReport& sq = *row(rows, "square").report;
  const FunctionalReport& hex = *row(rows, "regular-ngon/sides=6").report;
  o.check(std::abs(sq.beta * sq.beta - 0.841037) <= 1e-4, "square beta2 " + num(sq.beta * sq.beta, 8));
  o.check(std::abs(hex.beta * hex.beta - 0.320489) <= 1e-4, "hexagon beta2 " + num(hex.beta * hex.beta, 8));
  o.check(std::abs(sq.gamma - 6.248778) <= 1e-4, "square gamma " + num(sq.gamma, 9));
  o.check(std::abs(hex.gamma - 6.277343) <= 1e-4, "hexagon gamma " + num(hex.gamma, 9));
  o.note(std::to_string(rows.size()) + " shapes, max residual/P " + num(worst, 3) + ", square beta2 " +
         num(sq.beta * sq.beta, 7) + ", hexagon beta2 " + num(hex.beta * hex.beta, 7) + ", gamma " +
         num(sq.gamma, 7) + " / " + num(hex.gamma, 7));
}

void strong_poincare(Outcome& o) {
  const std::vector<CorpusRow>& rows = corpus_rows(4096);
  require_reports(o, rows);
  double lowest = 1e300;
  for (const CorpusRow& r : rows) {
    if (!r.report) continue;
    const double slack = r.report->sp_lhs - r.report->sp_rhs;
    lowest = std::min(lowest, slack);
    o.check(slack >= -1e-6, r.id + ": slack " + num(slack));
  }
  const double hex = row(rows, "regular-ngon/sides=6").report->sp_slack;
  const double sq = row(rows, "square").report->sp_slack;
  o.check(within(hex, 0.00433, 0.10), "hexagon slack " + num(hex));
  o.check(within(sq, 0.02529, 0.10), "square slack " + num(sq));
  o.note("min slack " + num(lowest, 4) + ", hexagon " + num(hex, 5) + ", square " + num(sq, 5));
}

void fuglede(Outcome& o) {
  std::string modes;
  for (int k = 2; k <= 6; ++k) {
    const FugledeRatio r = fuglede_ratio(mode_set(k, 1e-3));
    const double limit = mode_ratio_limit(k);
    o.check(within(r.ratio, limit, 0.02), "mode " + std::to_string(k) + " ratio " + num(r.ratio));
    modes += (k > 2 ? " " : "") + num(r.ratio / limit, 5);
  }
  RandomFamilyOptions family;
  family.seed = 2024;
  const FugledeExperiment coarse = fuglede_experiment(200, family, 4096, threads());
  const FugledeExperiment fine = fuglede_experiment(200, family, 8192, threads());
  o.check(coarse.infimum > 0, "random infimum " + num(coarse.infimum));
  o.check(within(fine.infimum, coarse.infimum, 0.10), "infimum moves under doubling: " + num(coarse.infimum) +
                                                          " -> " + num(fine.infimum));
  o.note("mode ratio/limit k=2..6: " + modes + "; random inf " + num(coarse.infimum) + " (N 4096), " +
         num(fine.infimum) + " (N 8192)");
}

void sharpness(Outcome& o) {
  const SharpnessTable t = sharpness_family({0.08, 0.04, 0.02, 0.01}, {}, threads());
  const SharpnessRow& s = t.rows.back();
  o.check(std::abs(t.slope - 2.0) <= 0.05, "slope " + num(t.slope));
  o.check(within(s.alpha / s.t, 4.0, 0.02), "alpha/t " + num(s.alpha / s.t));
  o.check(within(s.beta2 / s.D, 4.0 / 3.0, 0.02), "beta2/D " + num(s.beta2 / s.D));
  o.note("slope " + num(t.slope, 5) + ", alpha/t " + num(s.alpha / s.t, 5) + ", beta2/D " + num(s.beta2 / s.D, 5));
}

void ball_uniqueness(Outcome& o) {
  FlowConfig c;
  c.lambda = 3.0;
  c.R0 = 2.0;
  UniquenessOptions u;
  u.seeds = 20;
  u.seed = 7;
  u.min_mode = 2;
  u.max_mode = 6;
  u.amplitude = 0.15;
  u.threads = threads();
  const UniquenessReport rep = ball_uniqueness_experiment(c, u);
  for (const UniquenessRun& r : rep.runs) {
    const std::string id = "seed " + std::to_string(r.seed_index);
    o.check(r.final_deficit <= 1e-3, id + ": final D " + num(r.final_deficit));
    o.check(r.final_volume_error <= 1e-3, id + ": volume error " + num(r.final_volume_error));
    o.check(r.min_energy >= 2 * kPi - 1e-6, id + ": energy " + num(r.min_energy, 12));
  }
  o.check(rep.runs.size() == 20, "expected 20 runs");
  o.note(std::to_string(rep.runs.size()) + " runs, converged fraction " + num(rep.fraction_converged) +
         ", max D " + num(rep.max_deficit, 3) + ", max volume error " + num(rep.max_volume_error, 3) +
         ", min energy - 2pi " + num(rep.min_energy - 2 * kPi, 3));
}

void center_stability(Outcome& o) {
  const std::vector<double> ts{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> y(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    y[i] = center_stability_check(mode_set(2, ts[i]).u.shape(), 1.0);
    o.check(y[i] <= 0.01, "|y*| " + num(y[i]) + " at t " + num(ts[i]));
    if (i) o.check(y[i] <= y[i - 1] + 1e-4, "|y*| grows at t " + num(ts[i]));
  }
  o.note("|y*| = " + num(y[0], 3) + ", " + num(y[1], 3) + ", " + num(y[2], 3) + ", " + num(y[3], 3));
}

void invariance(Outcome& o) {
  const std::vector<CorpusEntry> entries = expand_corpus(json::parse(R"({"shapes": [
      {"generator": "square"},
      {"generator": "regular-ngon", "sides": 6},
      {"generator": "ellipse", "aspect": 2},
      {"generator": "stadium", "length": 1},
      {"generator": "random-fourier", "count": 1, "modes": 6, "scale": 0.3, "seed": 5}]})"));
  const Point shift = make_point(0.7, -0.3);
  const std::vector<double> gaps = parallel_map(entries.size(), threads(), [&](std::size_t i) {
    const ShapeRep& s = *entries[i].shape;
    const FunctionalReport a = inequality_panel(s);
    const FunctionalReport b = inequality_panel(scale(translate(s, shift), 2.5));
    return std::max({std::abs(a.D - b.D), std::abs(a.alpha - b.alpha), std::abs(a.beta - b.beta),
                     std::abs(a.A - b.A)});
  });
  double worst = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    worst = std::max(worst, gaps[i]);
    o.check(gaps[i] <= 1e-8, entries[i].id + ": moved by " + num(gaps[i]));
  }

  // boundary route against the polar-coordinate oracle, square of side 1 at the origin corner
  const ShapeRep sq = rectangle(1, 1);
  const BoundaryQuadrature q = boundary_quadrature(sq);
  const Eigen::Matrix2Xd& v = sq.as_polygon().vertices;
  double riesz_gap = 0.0;
  for (const Point& y : {make_point(0.1, -0.05), make_point(1.3, 0.9), make_point(0.4999, 0.25),
                         make_point(0.2, 0.5 + 1e-3), make_point(-0.5 - 1e-3, -0.3)}) {
    const double boundary = riesz_boundary(q, y);
    const double oracle = oracle::riesz_polar(v, Eigen::Vector2d(y));
    const double gap = std::abs(boundary - oracle);
    riesz_gap = std::max(riesz_gap, gap);
    o.check(gap <= 1e-4, "Riesz routes differ by " + num(gap) + " at (" + num(y[0]) + ", " + num(y[1]) + ")");
  }
  o.note("max panel change " + num(worst, 3) + " over 5 shapes, max Riesz route gap " + num(riesz_gap, 3));
}

void ordering(Outcome& o) {
  const std::vector<CorpusRow>& coarse = corpus_rows(4096);
  const std::vector<CorpusRow>& fine = corpus_rows(8192);
  require_reports(o, coarse);
  require_reports(o, fine);
  double worst_gap = 1e300, worst_a2d = 0.0, worst_prop = 0.0;
  for (std::size_t i = 0; i < coarse.size() && i < fine.size(); ++i) {
    if (!coarse[i].report || !fine[i].report) continue;
    const FunctionalReport& a = *coarse[i].report;
    const FunctionalReport& b = *fine[i].report;
    const double gap = a.A - std::sqrt(2.0) * a.beta;
    worst_gap = std::min(worst_gap, gap);
    o.check(gap >= -1e-8, coarse[i].id + ": A - sqrt2 beta = " + num(gap));
    if (a.D <= 1e-10) continue;
    const double d1 = std::abs(b.ratio_A2_D / a.ratio_A2_D - 1);
    const double d2 = std::abs(b.ratio_prop / a.ratio_prop - 1);
    worst_a2d = std::max(worst_a2d, d1);
    worst_prop = std::max(worst_prop, d2);
    o.check(d1 <= 0.02, coarse[i].id + ": A^2/D moves " + num(d1));
    o.check(d2 <= 0.02, coarse[i].id + ": (A + sqrt D)/beta moves " + num(d2));
  }

  // α²/D along t cos 2θ as t -> 0
  const std::vector<CorpusRow> family = run_corpus(expand_corpus(json::parse(R"({"shapes": [
      {"generator": "perturbed-ball", "mode": 2, "amplitude": [0.02, 0.01, 0.005]}]})")), {}, {}, threads());
  std::stringstream csv;
  write_corpus_csv(csv, family);
  const json c = estimate_constants(read_csv(csv));
  const double lower = c["mode2_lower_bound"]["alpha2_over_D"].get<double>();
  o.check(within(lower, 32.0 / (3.0 * kPi), 0.05), "alpha^2/D " + num(lower));
  o.note("min A - sqrt2 beta " + num(worst_gap, 3) + ", N-doubling change A^2/D " + num(worst_a2d, 3) +
         ", prop " + num(worst_prop, 3) + ", mode-2 alpha^2/D " + num(lower, 6) + " vs " +
         num(32.0 / (3.0 * kPi), 6));
}

struct Criterion {
  int number;
  const char* name;
  std::function<void(Outcome&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "identity suite", identity_suite},   {2, "strong Poincare", strong_poincare},
      {3, "Fuglede", fuglede},                 {4, "sharpness", sharpness},
      {5, "ball uniqueness", ball_uniqueness}, {6, "center stability", center_stability},
      {7, "invariance", invariance},           {8, "ordering", ordering}};
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (const Criterion& c : criteria()) selected.push_back(c.number);

  bool all_pass = true;
  for (int n : selected) {
    const Criterion* c = nullptr;
    for (const Criterion& x : criteria())
      if (x.number == n) c = &x;
    if (!c) {
      std::fprintf(stderr, "unknown criterion %d\n", n);
      return 2;
    }
    Outcome o;
    try {
      c->run(o);
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool pass = o.failures.empty();
    all_pass = all_pass && pass;
    std::string detail;
    for (const std::string& s : o.notes) detail += s;
    for (std::size_t i = 0; i < o.failures.size() && i < 4; ++i) detail += "; FAILED " + o.failures[i];
    if (o.failures.size() > 4) detail += "; +" + std::to_string(o.failures.size() - 4) + " more";
    std::printf("criterion %d %-17s %s  %s\n", c->number, c->name, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
