#include "isoq/corpus.hpp"
#include "isoq/functionals.hpp"
#include "isoq/harness.hpp"
#include "isoq/nearly_spherical.hpp"
#include "isoq/shape_io.hpp"
#include "isoq/shapeflow.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace isoq;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitViolation = 3;

struct Global {
  int nodes = kDefaultNodes;
  std::optional<double> tol;
  int threads = 0;

  EvalOptions eval() const {
    EvalOptions o;
    o.nodes = nodes;
    if (tol) o.center_tolerance = *tol;
    return o;
  }
};

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("not an integer list: '" + s + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("not a number list: '" + s + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty number list");
  return out;
}

/// "2..8" or "4".
std::pair<int, int> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  const std::vector<int> ends = dots == std::string::npos
                                    ? parse_int_list(s)
                                    : std::vector<int>{parse_int_list(s.substr(0, dots)).front(),
                                                       parse_int_list(s.substr(dots + 2)).front()};
  const int lo = ends.front(), hi = ends.back();
  if (ends.size() > 2 || lo < 2 || hi < lo) throw ValidationError("bad mode range '" + s + "'");
  return {lo, hi};
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  return out;
}

int cmd_eval(const Global& g, const std::string& path) {
  const FunctionalReport r = inequality_panel(load_shape(path), g.eval());
  const std::vector<std::string> v = panel_violations(r);
  json j = to_json(r);
  j["violations"] = v;
  std::cout << j.dump(2) << '\n';
  return v.empty() ? kExitOk : kExitViolation;
}

int cmd_corpus(const Global& g, const std::string& spec_path, const std::string& out_path) {
  const json spec = spec_path.empty() ? default_corpus_spec() : read_json_file(spec_path);
  const std::vector<CorpusEntry> entries = expand_corpus(spec);
  const std::vector<CorpusRow> rows = run_corpus(entries, g.eval(), {}, g.threads);
  if (out_path.empty() || out_path == "-") {
    write_corpus_csv(std::cout, rows);
  } else {
    std::ofstream out = open_output(out_path);
    write_corpus_csv(out, rows);
  }
  int violations = 0, errors = 0;
  for (const CorpusRow& r : rows) {
    if (r.status == RowStatus::Violation) {
      ++violations;
      std::cerr << "violation: " << r.id << " (N=" << r.nodes << "): " << r.message << '\n';
    } else if (r.status == RowStatus::Error) {
      ++errors;
      std::cerr << "error: " << r.id << ": " << r.message << '\n';
    }
  }
  std::cerr << rows.size() << " rows, " << violations << " violations, " << errors << " errors\n";
  return violations ? kExitViolation : kExitOk;
}

int cmd_constants(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::cout << estimate_constants(read_csv(in)).dump(2) << '\n';
  return kExitOk;
}

int cmd_fuglede(const Global& g, const std::string& modes, int samples, std::uint64_t seed, double amplitude,
                double t) {
  const auto [lo, hi] = parse_range(modes);
  if (samples < 1) throw ValidationError("--samples must be positive");
  RandomFamilyOptions family;
  family.min_mode = lo;
  family.max_mode = hi;
  family.amplitude = amplitude;
  family.seed = seed;
  const FugledeExperiment e = fuglede_experiment(samples, family, g.nodes, g.threads);

  json single = json::array();
  for (int k = lo; k <= hi; ++k) {
    const FugledeRatio r = fuglede_ratio(mode_set(k, t), g.nodes);
    single.push_back({{"k", k}, {"t", t}, {"ratio", r.ratio}, {"limit", mode_ratio_limit(k)}});
  }
  json ratios = json::array();
  for (const FugledeSample& s : e.samples) ratios.push_back(s.ratio.ratio);
  std::cout << json{{"modes", {lo, hi}},
                    {"samples", samples},
                    {"seed", seed},
                    {"amplitude", amplitude},
                    {"N", g.nodes},
                    {"infimum", e.infimum},
                    {"argmin", e.argmin},
                    {"single_modes", single},
                    {"ratios", ratios}}
                   .dump(2)
            << '\n';
  return e.infimum > 0 ? kExitOk : kExitViolation;
}

struct FlowArgs {
  double lambda = 3.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  bool no_oscillation = false;
  int mode = 0;
  double amplitude = 0.15;
  int max_iterations = 400;
  int uniqueness = 0;
};

int cmd_flow(const Global& g, const FlowArgs& a) {
  FlowConfig c;
  c.lambda = a.lambda;
  c.eps = a.eps;
  c.oscillation_term = !a.no_oscillation;
  c.max_iterations = a.max_iterations;
  if (g.tol) c.tolerance = *g.tol;
  c.validate();
  if (a.eps < 0) throw ValidationError("--eps must be nonnegative");

  if (a.uniqueness > 0) {
    UniquenessOptions o;
    o.seeds = a.uniqueness;
    o.seed = a.seed;
    o.amplitude = a.amplitude;
    o.threads = g.threads;
    const UniquenessReport rep = ball_uniqueness_experiment(c, o);
    std::cout << to_json(rep).dump(2) << '\n';
    return rep.energy_bound_ok ? kExitOk : kExitViolation;
  }

  UniquenessOptions o;
  o.seed = a.seed;
  o.amplitude = a.amplitude;
  const FourierSeries init = a.mode > 0 ? FourierSeries::single_mode(a.mode, a.amplitude) : uniqueness_seed(o, 0);
  const FlowResult r = minimize(init, c);
  if (!a.out.empty()) {
    std::ofstream out = open_output(a.out);
    for (const FlowState& s : r.trajectory) out << to_json(s).dump() << '\n';
  }
  const FlowState& last = r.final_state();
  bool floor_ok = true;
  for (const FlowState& s : r.trajectory) floor_ok = floor_ok && s.isoperimetric_ok;
  std::cout << json{{"converged", r.converged},
                    {"iterations", last.iteration},
                    {"energy", last.energy.total},
                    {"P", last.energy.P},
                    {"volume", last.energy.volume},
                    {"beta2", last.energy.beta2},
                    {"D", last.deficit},
                    {"isoperimetric_ok", floor_ok}}
                   .dump(2)
            << '\n';
  return floor_ok ? kExitOk : kExitViolation;
}

int cmd_refine(const Global& g, const std::string& path, const std::string& nodes, std::optional<double> ref_P,
               std::optional<double> ref_gamma) {
  const RefinementTable t = refinement_study(load_shape(path), parse_int_list(nodes), ref_P, ref_gamma, g.eval(),
                                             g.threads);
  std::cout << to_json(t).dump(2) << '\n';
  return kExitOk;
}

int cmd_sharpness(const Global& g, const std::string& ts, const std::string& out_path) {
  const SharpnessTable table = sharpness_family(parse_double_list(ts), g.eval(), g.threads);
  std::ostringstream csv;
  csv.precision(17);
  csv << "t,alpha,D,beta2,A2,ratio\n";
  for (const SharpnessRow& r : table.rows)
    csv << r.t << ',' << r.alpha << ',' << r.D << ',' << r.beta2 << ',' << r.A2 << ',' << r.ratio << '\n';
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    open_output(out_path) << csv.str();
  }
  std::cerr << "slope of log D against log alpha: " << table.slope << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantitative isoperimetric functionals: evaluation, corpus runs and experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--quadrature-n", g.nodes, "Boundary nodes for planar shapes")->check(CLI::Range(16, 1 << 24));
  app.add_option("--tol", g.tol, "Optimizer stopping tolerance (center searches, flow step)")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "Worker threads, 0 = hardware concurrency")->check(CLI::NonNegativeNumber);

  std::string shape_path;
  auto* eval = app.add_subcommand("eval", "Print the functional panel of one shape as JSON");
  eval->add_option("shape", shape_path, "Shape JSON file")->required();

  std::string spec_path, out_path;
  auto* corpus = app.add_subcommand("corpus", "Evaluate a corpus spec and write CSV rows");
  corpus->add_option("spec", spec_path, "Corpus spec JSON (omit for the built-in corpus)");
  corpus->add_option("-o,--output", out_path, "CSV output path (default stdout)");

  std::string csv_path;
  auto* constants = app.add_subcommand("constants", "Empirical constants from a corpus CSV");
  constants->add_option("csv", csv_path, "Corpus CSV")->required();

  std::string modes = "2..8";
  int samples = 200;
  std::uint64_t seed = 0;
  double amplitude = 0.05, t = 1e-3;
  auto* fuglede = app.add_subcommand("fuglede", "Fuglede ratios over random nearly spherical sets");
  fuglede->add_option("--modes", modes, "Mode range lo..hi")->capture_default_str();
  fuglede->add_option("--samples", samples, "Number of random samples")->capture_default_str();
  fuglede->add_option("--seed", seed, "Random seed")->capture_default_str();
  fuglede->add_option("--amplitude", amplitude, "W^{1,inf} size of each sample")->capture_default_str();
  fuglede->add_option("--t", t, "Amplitude of the single-mode table")->capture_default_str();

  FlowArgs fa;
  auto* flow = app.add_subcommand("flow", "Penalized energy descent over planar radial graphs");
  flow->add_option("--lambda", fa.lambda, "Volume penalty weight (> 2)")->capture_default_str();
  flow->add_option("--eps", fa.eps, "Target beta^2 of the oscillation penalty")->capture_default_str();
  flow->add_option("--seed", fa.seed, "Seed of the random initial shape")->capture_default_str();
  flow->add_option("-o,--output", fa.out, "Trajectory JSON-lines path");
  flow->add_flag("--no-oscillation", fa.no_oscillation, "Drop the oscillation penalty");
  flow->add_option("--mode", fa.mode, "Start from amplitude * cos(mode theta) instead of a random shape");
  flow->add_option("--amplitude", fa.amplitude, "Initial sup|u|")->capture_default_str();
  flow->add_option("--max-iterations", fa.max_iterations, "Iteration cap")->capture_default_str();
  flow->add_option("--uniqueness", fa.uniqueness, "Run the ball uniqueness experiment over this many seeds");

  std::string nodes = "512,1024,2048,4096";
  std::optional<double> ref_P, ref_gamma;
  auto* refine = app.add_subcommand("refine", "Quadrature refinement table of one shape");
  refine->add_option("shape", shape_path, "Shape JSON file")->required();
  refine->add_option("--N", nodes, "Ascending node counts, comma-separated")->capture_default_str();
  refine->add_option("--reference-P", ref_P, "Exact perimeter, if known");
  refine->add_option("--reference-gamma", ref_gamma, "Exact gamma, if known");

  std::string ts = "0.08,0.04,0.02,0.01";
  auto* sharpness = app.add_subcommand("sharpness", "Ratio table along t cos 2theta as CSV");
  sharpness->add_option("--t", ts, "Amplitudes, comma-separated")->capture_default_str();
  sharpness->add_option("-o,--output", out_path, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*eval) return cmd_eval(g, shape_path);
    if (*corpus) return cmd_corpus(g, spec_path, out_path);
    if (*constants) return cmd_constants(csv_path);
    if (*fuglede) return cmd_fuglede(g, modes, samples, seed, amplitude, t);
    if (*flow) return cmd_flow(g, fa);
    if (*refine) return cmd_refine(g, shape_path, nodes, ref_P, ref_gamma);
    if (*sharpness) return cmd_sharpness(g, ts, out_path);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
