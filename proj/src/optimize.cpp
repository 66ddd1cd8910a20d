#include "isoq/optimize.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace isoq {
namespace {

NelderMeadResult run_simplex(const Objective& f, const Eigen::VectorXd& x0, double step,
                             double x_tol, int budget) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> x(n + 1, x0);
  std::vector<double> fx(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) x[i + 1][i] += step;
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& p) {
    ++evals;
    return f(p);
  };
  for (auto i = 0u; i < x.size(); ++i) fx[i] = eval(x[i]);

  std::vector<int> order(n + 1);
  auto size = [&]() {
    double s = 0.0;
    for (Eigen::Index i = 1; i <= n; ++i) s = std::max(s, (x[order[i]] - x[order[0]]).norm());
    return s;
  };

  NelderMeadResult result;
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    const double diameter = size();
    if (diameter < x_tol || evals >= budget) {
      result.converged = diameter < x_tol;
      result.simplex_size = diameter;
      break;
    }
    const int best = order[0], worst = order[n], second = order[n - 1];
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += x[order[i]];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + (centroid - x[worst]);
    const double fr = eval(xr);
    if (fr < fx[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - x[worst]);
      const double fe = eval(xe);
      if (fe < fr) {
        x[worst] = xe, fx[worst] = fe;
      } else {
        x[worst] = xr, fx[worst] = fr;
      }
      continue;
    }
    if (fr < fx[second]) {
      x[worst] = xr, fx[worst] = fr;
      continue;
    }
    // contraction, outside if the reflection improved on the worst vertex
    const bool outside = fr < fx[worst];
    const Eigen::VectorXd xc =
        outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (x[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : fx[worst])) {
      x[worst] = xc, fx[worst] = fc;
      continue;
    }
    for (Eigen::Index i = 1; i <= n; ++i) {
      const int k = order[i];
      x[k] = x[best] + 0.5 * (x[k] - x[best]);
      fx[k] = eval(x[k]);
    }
  }
  result.x = x[order[0]];
  result.value = fx[order[0]];
  result.evaluations = evals;
  return result;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                             const NelderMeadOptions& options) {
  NelderMeadResult first =
      run_simplex(f, x0, options.initial_step, options.x_tolerance, options.max_evaluations);
  if (!first.converged) return first;
  const double restart_step = std::max(1e3 * options.x_tolerance, 1e-3 * options.initial_step);
  NelderMeadResult second = run_simplex(f, first.x, restart_step, options.x_tolerance,
                                        options.max_evaluations - first.evaluations);
  second.evaluations += first.evaluations;
  if (second.value > first.value) {
    first.evaluations = second.evaluations;
    return first;
  }
  return second;
}

}  // namespace isoq
