#pragma once

#include "isoq/common.hpp"
#include "isoq/functionals.hpp"
#include "isoq/shape.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace isoq {

/// u on the unit sphere: Fourier modes in 2D, a latitude-longitude grid in 3D.
class SphericalFunction {
 public:
  explicit SphericalFunction(FourierSeries u);
  explicit SphericalFunction(SphericalGrid u);

  int dim() const { return is_fourier() ? 2 : 3; }
  bool is_fourier() const { return std::holds_alternative<FourierSeries>(data_); }
  const FourierSeries& fourier() const { return std::get<FourierSeries>(data_); }
  const SphericalGrid& grid() const { return std::get<SphericalGrid>(data_); }

  /// u(z) for a unit vector z (grid: bilinear interpolation).
  double value(const Point& z) const;
  /// Tangential gradient at z (grid: interpolated centered differences).
  Point tangential_gradient(const Point& z) const;

  /// The radial graph {(1 + u(z)) z} about the origin.
  ShapeRep shape() const;

 private:
  std::variant<FourierSeries, SphericalGrid> data_;
  GridGradient grad_;  // empty for Fourier data
};

struct SobolevNorms {
  double L2 = 0.0;      ///< ‖u‖²_{L²}
  double H1semi = 0.0;  ///< ‖∇_τ u‖²_{L²}
  double W1inf = 0.0;   ///< sup|u| + sup|∇_τ u|

  double W12() const { return L2 + H1semi; }  ///< ‖u‖²_{W^{1,2}}
};

/// 2D: exact by Parseval; sup norms by dense sampling.
/// 3D: product-rule quadrature of the gridded values and differences.
SobolevNorms sobolev_norms(const SphericalFunction& u);

/// Outward unit normal of the radial graph at (1 + u(z)) z:
/// ((1 + u) z - ∇_τ u) / sqrt((1 + u)² + |∇_τ u|²).
Point normal_vector(const SphericalFunction& u, const Point& z);

struct NormalizeOptions {
  double eps0 = 0.1;             ///< smallness threshold on ‖u‖_{W^{1,∞}}
  double volume_tolerance = 1e-12;
  double barycenter_tolerance = 1e-10;
  int max_newton = 50;
  int max_recenter = 20;
  int extra_modes = 24;  ///< 2D: modes added when resampling about a new center
};

struct NormalizedSphericalSet {
  SphericalFunction u;
  double volume = 0.0;
  Point barycenter;
  int newton_iterations = 0;
  int recenter_iterations = 0;
  double W1inf = 0.0;
  bool small = true;  ///< W1inf <= eps0
};

/// Volume ωₙ by Newton on the constant mode; barycenter 0 by translating the
/// set and re-sampling its radial function about the new origin. Throws
/// ValidationError if 1 + u <= 0 or Newton fails.
NormalizedSphericalSet normalize(const SphericalFunction& u, const NormalizeOptions& options = {});

struct FugledeRatio {
  double D = 0.0;
  double norm2 = 0.0;  ///< ‖u‖²_{W^{1,2}}
  double ratio = 0.0;  ///< D / norm2, NaN when norm2 vanishes
  bool small = true;
};

FugledeRatio fuglede_ratio(const NormalizedSphericalSet& set, int nodes = kDefaultNodes);

/// Normalized u = t cos(k θ).
NormalizedSphericalSet mode_set(int k, double t, const NormalizeOptions& options = {});

/// Limit of D / ‖u‖²_{W^{1,2}} along t cos(k θ) as t -> 0.
double mode_ratio_limit(int k);

struct SharpnessRow {
  double t = 0.0;
  double alpha = 0.0;
  double D = 0.0;
  double beta2 = 0.0;
  double A2 = 0.0;
  double ratio = 0.0;  ///< A² / D
};

struct SharpnessTable {
  std::vector<SharpnessRow> rows;
  double slope = 0.0;  ///< least-squares slope of log D against log alpha
};

/// The family t cos 2θ, normalized, one row per t.
SharpnessTable sharpness_family(const std::vector<double>& t_values, const EvalOptions& options = {},
                                int threads = 1);

struct ChainCheck {
  double beta2 = 0.0;
  double A2 = 0.0;
  double D = 0.0;
  double gamma = 0.0;
  double gamma_origin = 0.0;  ///< ∫_E |x|^{-1} dx; 2D: ∫(1 + u) dθ
  double ratio_A2_D = 0.0;    ///< NaN when D vanishes
  double ratio_b2_D = 0.0;
  bool ordered = true;        ///< beta² <= A²
};

ChainCheck fuglede_chain_check(const NormalizedSphericalSet& set, const EvalOptions& options = {});

struct RandomFamilyOptions {
  int min_mode = 2;
  int max_mode = 8;
  double amplitude = 0.05;  ///< target ‖u‖_{W^{1,∞}} before normalization
  std::uint64_t seed = 0;
};

/// Sample `index`: Gaussian coefficients with variance k^{-4} on the modes
/// [min_mode, max_mode], rescaled to the target W^{1,∞} size.
FourierSeries random_fourier(const RandomFamilyOptions& options, std::uint64_t index);

struct FugledeSample {
  std::uint64_t index = 0;
  FugledeRatio ratio;
};

struct FugledeExperiment {
  std::vector<FugledeSample> samples;
  double infimum = 0.0;
  std::uint64_t argmin = 0;
};

FugledeExperiment fuglede_experiment(int samples, const RandomFamilyOptions& family,
                                     int nodes = kDefaultNodes, int threads = 1);

}  // namespace isoq
