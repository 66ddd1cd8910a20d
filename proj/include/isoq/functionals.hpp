#pragma once

#include "isoq/common.hpp"
#include "isoq/geometry.hpp"
#include "isoq/shape.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

namespace isoq {

struct EvalOptions {
  int nodes = kDefaultNodes;        ///< boundary nodes for planar shapes
  double center_tolerance = 1e-8;   ///< simplex diameter at which a search stops
  int max_evaluations = 4000;       ///< per restart
  double multiplicity_tolerance = 1e-6;
};

/// A maximizer of y -> ∫_E |x - y|^{-1} dx.
struct CenterResult {
  Point center;
  double gamma = 0.0;
  int restarts = 0;
  int evaluations = 0;
  double simplex_size = 0.0;
  bool converged = false;
  /// Other restarts that ended within multiplicity_tolerance of the best
  /// value at a distinct point, in seed order.
  std::vector<Point> other_maxima;

  bool multiple() const { return !other_maxima.empty(); }
};

/// (P(E) - P(B_r)) / r^{n-1} with |B_r| = |E|.
double deficit(const ShapeRep& shape, int nodes = kDefaultNodes);

/// ∫_{∂E} nu · (x - y) / |x - y| dH^{n-1}, which equals (n - 1) ∫_E dx / |x - y|.
/// Throws ValidationError if y lies within 1e-12 of a node.
double riesz_boundary(const BoundaryQuadrature& q, const Point& y);

/// ∫_{∂E} (1 - nu · (x - y) / |x - y|) dH^{n-1}.
double oscillation(const BoundaryQuadrature& q, const Point& y);

/// ∫_E dx / |x - y|. Closed form per edge for polygons (asinh of the edge
/// endpoints seen from y); boundary quadrature for radial graphs.
double riesz_potential(const ShapeRep& shape, const Point& y, int nodes = kDefaultNodes);

/// gamma(E) and a center: multistart simplex search from the barycenter and
/// 2n axis-offset seeds (plus any extra seeds, tried last).
CenterResult gamma(const ShapeRep& shape, const EvalOptions& options = {},
                   std::span<const Point> extra_seeds = {});

struct BetaResult {
  double beta = 0.0;         ///< sqrt(max(0, P - (n-1) gamma)) in the |E| = omega_n gauge
  double beta_direct = 0.0;  ///< sqrt of the boundary oscillation at the same center
  double residual = 0.0;     ///< |beta^2 - beta_direct^2|
  Point center;              ///< in the input's coordinates
  bool clamped = false;      ///< identity value was negative and clamped to 0
  bool quadrature_failure = false;  ///< identity value below -1e-8
  CenterResult center_search;
};

BetaResult beta(const ShapeRep& shape, const EvalOptions& options = {});

struct LocalBeta {
  double beta2 = 0.0;  ///< max(0, P - (n-1) gamma) in the |E| = omega_n gauge
  Point center;        ///< local maximizer, input coordinates
  bool converged = false;
};

/// beta² from one simplex search started at `start` (input coordinates);
/// the warm-started variant used when the shape changes a little at a time.
LocalBeta beta_squared_from(const ShapeRep& shape, const Point& start, const EvalOptions& options = {});

struct FraenkelResult {
  double alpha = 0.0;
  Point center;
  bool converged = false;
};

/// min_y |E Δ B_r(y)| / r^n.
FraenkelResult fraenkel(const ShapeRep& shape, const EvalOptions& options = {});

struct AsymmetryResult {
  double value = 0.0;
  Point center;
  double fraenkel_term = 0.0;     ///< |E Δ B_r(y_A)| / r^n
  double oscillation_term = 0.0;  ///< sqrt(2 osc(y_A) / r^{n-1})
  /// min(S(y_alpha), S(y_gamma)): the objective at the two single-term optima.
  double upper_bound = 0.0;
  bool converged = false;
};

/// min_y { |E Δ B_r(y)| / r^n + sqrt(2 osc(y) / r^{n-1}) }, the coupled objective.
AsymmetryResult asymmetry_A(const ShapeRep& shape, const EvalOptions& options = {});

/// c_n = (1/(4n)) ((n-1)/n) 2^{-(n+1)/n}.
double uniform_concavity_constant(int n);

/// n omega_n (2 - (1 + a/omega_n)^{(n-1)/n} - (1 - a/omega_n)^{(n-1)/n}).
double annulus_bound(double a, int n);

struct StrongPoincareResult {
  double lhs = 0.0;    ///< beta^2
  double rhs = 0.0;    ///< D + (8 n c_n / omega_n) a^2
  double slack = 0.0;  ///< lhs - rhs
  double a = 0.0;      ///< |E \ B_1(y*)| in the |E| = omega_n gauge
  double deficit = 0.0;
  Point center;
  bool center_converged = false;
};

/// Evaluated in the |E| = omega_n gauge with the unit ball at the gamma center.
StrongPoincareResult strong_poincare_check(const ShapeRep& shape, const EvalOptions& options = {});

/// |y*| for a shape with |E| = omega_n and |E Δ B_1| < delta (else ValidationError).
double center_stability_check(const ShapeRep& shape, double delta, const EvalOptions& options = {});

/// Full panel of one shape. Centers are in the input's coordinates;
/// D, beta, alpha, A and the strong-Poincaré sides are scale-free.
struct FunctionalReport {
  int dim = 2;
  double P = 0.0;
  double V = 0.0;
  double r = 0.0;
  double D = 0.0;
  double gamma = 0.0;
  Point y_star;
  double beta = 0.0;
  double beta_direct = 0.0;
  double alpha = 0.0;
  Point y_alpha;
  double A = 0.0;
  Point y_A;
  double A_upper = 0.0;
  double res_identity = 0.0;
  double ratio_A2_D = 0.0;  ///< NaN when not applicable
  double ratio_b2_D = 0.0;
  double ratio_prop = 0.0;  ///< (A + sqrt D) / beta
  double sp_lhs = 0.0;
  double sp_rhs = 0.0;
  double sp_slack = 0.0;
  double sym_diff_a = 0.0;
  bool converged = true;
  bool center_multiple = false;
  bool beta_clamped = false;
  bool quadrature_failure = false;
};

FunctionalReport inequality_panel(const ShapeRep& shape, const EvalOptions& options = {});

struct PanelTolerances {
  double ordering = 1e-8;        ///< A >= sqrt(2) beta - ordering
  double strong_poincare = 1e-6; ///< slack >= -strong_poincare
  double identity = 1e-6;        ///< residual <= identity * P
  double deficit = 1e-9;         ///< D >= -deficit
};

/// Parameter-free assertions that fail on this report.
std::vector<std::string> panel_violations(const FunctionalReport& report,
                                          const PanelTolerances& tol = {});

/// Flat JSON with the fixed field names; NaN ratios become null.
nlohmann::json to_json(const FunctionalReport& report);

/// Fixed CSV columns (after any caller-owned prefix).
const std::vector<std::string>& report_csv_columns();
std::vector<std::string> report_csv_fields(const FunctionalReport& report);

}  // namespace isoq
