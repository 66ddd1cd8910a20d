#pragma once

#include <Eigen/Dense>

#include <functional>

namespace isoq {

struct NelderMeadOptions {
  double initial_step = 0.1;  ///< edge length of the starting simplex
  double x_tolerance = 1e-8;  ///< stop when every vertex is this close to the best
  int max_evaluations = 4000;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  double simplex_size = 0.0;  ///< max distance from the best vertex at exit
  bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Minimizes f from x0 with the standard reflection / expansion /
/// contraction / shrink moves. After the first convergence the search is
/// restarted once around the best vertex to escape a collapsed simplex.
NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                             const NelderMeadOptions& options = {});

}  // namespace isoq
