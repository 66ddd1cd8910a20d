#pragma once

#include "isoq/common.hpp"
#include "isoq/shape.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace isoq {

struct FlowConfig {
  int dim = 2;
  double lambda = 3.0;           ///< volume penalty weight, must exceed dim
  double eps = 0.0;              ///< target beta² of the oscillation penalty
  bool oscillation_term = true;  ///< false drops ¼|β² - ε| entirely
  double R0 = 2.0;               ///< confinement: 1 + u < R0
  double step = 0.02;            ///< initial step size eta
  int max_iterations = 400;
  double tolerance = 1e-9;       ///< stop when an attempted step is shorter
  int modes = 8;                 ///< Fourier cutoff K
  int nodes = 1024;              ///< boundary nodes per energy evaluation
  double fd_step = 1e-5;
  int max_failed_searches = 40;

  /// Throws ValidationError unless lambda > dim and R0 > 1.
  void validate() const;
};

struct EnergyTerms {
  double total = 0.0;
  double P = 0.0;
  double volume_penalty = 0.0;       ///< Λ ||E| - ω_n|
  double oscillation_penalty = 0.0;  ///< ¼ |β² - ε|, 0 when disabled
  double beta2 = 0.0;
  double volume = 0.0;
  Point center;                      ///< gamma center used for beta², if any
};

/// P + Λ||E| - ω_n| + ¼|β² - ε|, β² via P - (n-1)γ with a full center search
/// (or a local one from `warm_start`). Rejects shapes leaving B_{R0}.
EnergyTerms penalized_energy(const ShapeRep& shape, const FlowConfig& config,
                             const std::optional<Point>& warm_start = std::nullopt);

struct FlowState {
  int iteration = 0;
  FourierSeries u;
  EnergyTerms energy;
  double step_norm = 0.0;  ///< length of the accepted step into this state
  double eta = 0.0;        ///< step size after this iteration
  double deficit = 0.0;
  bool isoperimetric_ok = true;  ///< P >= n ω^{1/n} |E|^{(n-1)/n} - 1e-6
  bool converged = false;
};

nlohmann::json to_json(const FlowState& state);

struct FlowResult {
  std::vector<FlowState> trajectory;  ///< iterate 0 first; one entry per accepted step
  bool converged = false;
  int failed_searches = 0;            ///< consecutive failures at exit
  const FlowState& final_state() const { return trajectory.back(); }
};

/// Gradient descent on (a0, a_1..a_K, b_1..b_K) with central finite
/// differences and halving backtracking. A trial step that breaks
/// 1 + u > 0 or 1 + u < R0 counts as a failed trial. Converged when an
/// attempted step is shorter than the tolerance.
FlowResult minimize(const FourierSeries& init, const FlowConfig& config);

/// Largest relative gap between the gradient's directional derivative and a
/// half-step central difference, over `directions` random unit directions.
double gradient_consistency(const FourierSeries& u, const FlowConfig& config, int directions = 10,
                            std::uint64_t seed = 0);

struct UniquenessRun {
  std::uint64_t seed_index = 0;
  bool converged = false;
  int iterations = 0;
  double final_energy = 0.0;
  double final_deficit = 0.0;
  double final_volume_error = 0.0;
  double min_energy = 0.0;
  bool isoperimetric_ok = true;
};

struct UniquenessReport {
  std::vector<UniquenessRun> runs;
  double fraction_converged = 0.0;  ///< final D <= 1e-3 and ||E| - ω_n| <= 1e-3
  double max_volume_error = 0.0;
  double max_deficit = 0.0;
  double min_energy = 0.0;          ///< over every iterate of every run
  bool energy_bound_ok = true;      ///< min_energy >= n ω_n - 1e-6
};

struct UniquenessOptions {
  int seeds = 20;
  std::uint64_t seed = 0;
  int min_mode = 2;
  int max_mode = 6;
  double amplitude = 0.15;  ///< sup|u| of the initial shapes is at most this
  int threads = 1;
};

/// Random small radial graph number `index` for the uniqueness experiment.
FourierSeries uniqueness_seed(const UniquenessOptions& options, std::uint64_t index);

/// Flows from random initial shapes with the oscillation term disabled.
UniquenessReport ball_uniqueness_experiment(FlowConfig config, const UniquenessOptions& options);

nlohmann::json to_json(const UniquenessReport& report);

}  // namespace isoq
