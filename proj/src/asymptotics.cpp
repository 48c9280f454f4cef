#include "prelog/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "prelog/errors.hpp"
#include "prelog/parallel.hpp"

namespace prelog {

namespace {

struct Line {
  double intercept;
  double slope;
};

Line fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy == 0.0 || sxx == 0.0) return {my, 0.0};
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

}  // namespace

void require_asymptotic_grid(std::span<const double> snr_grid, std::size_t min_points) {
  if (snr_grid.size() < min_points)
    throw DomainError("snr grid needs at least " + std::to_string(min_points) + " points");
  for (std::size_t i = 0; i < snr_grid.size(); ++i) {
    if (!(snr_grid[i] > std::numbers::e)) throw DomainError("snr grid values must exceed e");
    if (i > 0 && !(snr_grid[i] > snr_grid[i - 1])) throw DomainError("snr grid must be strictly increasing");
  }
}

double gaussian_prelog(const SpectralDistribution& spectrum) { return flat_set_measure(spectrum); }

double penalty_ratio(const SpectralDistribution& spectrum, double snr) {
  if (!(snr > std::numbers::e)) throw DomainError("penalty ratio needs snr > e");
  return penalty_spectral(spectrum, snr) / std::log(snr);
}

LimitRatioReport limit_ratio_check(const SpectralDistribution& spectrum, std::span<const double> snr_grid,
                                   double tolerance) {
  require_asymptotic_grid(snr_grid, 1);
  LimitRatioReport report;
  report.snr_grid.assign(snr_grid.begin(), snr_grid.end());
  report.target = partition_measures(spectrum).positive_measure();
  for (const double snr : snr_grid) report.ratios.push_back(penalty_ratio(spectrum, snr));

  const std::size_t n = report.ratios.size();
  bool settling = true;
  for (std::size_t i = n >= 3 ? n - 2 : 1; i < n; ++i)
    settling = settling && std::fabs(report.ratios[i] - report.target) <= std::fabs(report.ratios[i - 1] - report.target);
  report.converged = std::fabs(report.ratios.back() - report.target) < tolerance && settling;
  return report;
}

PrelogEstimate prelog_lower_estimate(const FadingModel& model, std::span<const double> snr_grid, GammaMode mode) {
  require_asymptotic_grid(snr_grid, 4);
  PrelogEstimate est;
  est.snr_grid.assign(snr_grid.begin(), snr_grid.end());
  est.partition = partition_measures(model.spectral());
  est.flat_measure = est.partition.mu_s1;

  const std::size_t n = snr_grid.size();
  est.reports.resize(n);
  est.ratios.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const double snr = snr_grid[i];
    if (const auto* fixed = std::get_if<FixedGamma>(&mode))
      est.reports[i] = capacity_lower_bound(model, snr, fixed->gamma);
    else
      est.reports[i] = optimize_gamma(model, snr).report;
    est.ratios[i] = est.reports[i].clamped() / std::log(snr);
  });

  const std::size_t first = n / 2;
  std::vector<double> x, y;
  for (std::size_t i = first; i < n; ++i) {
    x.push_back(1.0 / std::log(snr_grid[i]));
    y.push_back(est.ratios[i]);
  }
  const Line line = fit_line(x, y);
  est.intercept = line.intercept;
  est.slope = line.slope;
  return est;
}

}  // namespace prelog
