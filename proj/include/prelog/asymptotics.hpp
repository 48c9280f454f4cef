#pragma once

#include <span>
#include <variant>
#include <vector>

#include "prelog/bounds.hpp"
#include "prelog/fading.hpp"
#include "prelog/spectra.hpp"

namespace prelog {

/// Pre-log of Gaussian fading: mu({x : F'(x) = 0}).
double gaussian_prelog(const SpectralDistribution& spectrum);

/// penalty_spectral(F, snr) / ln(snr); requires snr > e.
double penalty_ratio(const SpectralDistribution& spectrum, double snr);

struct LimitRatioReport {
  std::vector<double> snr_grid;
  std::vector<double> ratios;
  double target = 0.0;  // mu(S2) + mu(S3)
  bool converged = false;
};

/// Evaluates penalty_ratio on the grid. Converged when the last ratio is
/// within `tolerance` of the target and |ratio - target| does not increase
/// over the last three grid points.
LimitRatioReport limit_ratio_check(const SpectralDistribution& spectrum, std::span<const double> snr_grid,
                                   double tolerance = 0.02);

struct OptimizedGamma {};
struct FixedGamma {
  double gamma = 1.0;
};
using GammaMode = std::variant<OptimizedGamma, FixedGamma>;

struct PrelogEstimate {
  std::vector<double> snr_grid;
  std::vector<BoundReport> reports;
  std::vector<double> ratios;  // max(bound, 0) / ln(snr)
  double intercept = 0.0;      // extrapolated pre-log
  double slope = 0.0;          // coefficient of 1 / ln(snr)
  HarmonicPartition partition;
  double flat_measure = 0.0;
};

/// Bound ratios on the grid and their least-squares extrapolation in
/// 1/ln(snr) over the last half of the grid.
PrelogEstimate prelog_lower_estimate(const FadingModel& model, std::span<const double> snr_grid, GammaMode mode);

/// Validates an asymptotic grid: strictly increasing with min > e.
void require_asymptotic_grid(std::span<const double> snr_grid, std::size_t min_points);

}  // namespace prelog
