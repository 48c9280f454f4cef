#include "prelog/bounds.hpp"

#include <cmath>
#include <functional>

#include "prelog/errors.hpp"
#include "prelog/linalg.hpp"
#include "prelog/quadrature.hpp"

namespace prelog {

namespace {

struct Candidate {
  double gamma;
  double value;
};

// Larger value wins; equal values prefer the smaller gamma.
bool better(const Candidate& a, const Candidate& b) {
  return a.value > b.value || (a.value == b.value && a.gamma < b.gamma);
}

Candidate maximize_over_gamma(const std::function<double(double)>& objective) {
  using namespace gamma_search;
  const double lo_exp = kMinGammaExponent;
  const double step = double(kMaxGammaExponent - kMinGammaExponent) / (kGridPoints - 1);
  // Exponent formed from integers so that gamma = 1 lies exactly on the grid.
  auto grid_gamma = [&](int i) {
    return std::pow(10.0, double(kMinGammaExponent * (kGridPoints - 1) + (kMaxGammaExponent - kMinGammaExponent) * i) /
                              (kGridPoints - 1));
  };

  int best_index = 0;
  Candidate best{grid_gamma(0), objective(grid_gamma(0))};
  for (int i = 1; i < kGridPoints; ++i) {
    const Candidate c{grid_gamma(i), objective(grid_gamma(i))};
    if (better(c, best)) {
      best = c;
      best_index = i;
    }
  }

  // Golden-section refinement in log10(gamma) on the bracketing cells.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo_exp + step * std::max(best_index - 1, 0);
  double b = lo_exp + step * std::min(best_index + 1, kGridPoints - 1);
  auto eval = [&](double e) {
    const Candidate c{std::pow(10.0, e), objective(std::pow(10.0, e))};
    if (better(c, best)) best = c;
    return c.value;
  };
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval(c), fd = eval(d);
  for (int iter = 0; iter < kGoldenIterations; ++iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }
  return best;
}

}  // namespace

ChannelParams::ChannelParams(double peak_amplitude, double noise_variance)
    : peak_amplitude_(peak_amplitude), noise_variance_(noise_variance) {
  if (!(peak_amplitude >= 0.0) || !std::isfinite(peak_amplitude)) throw DomainError("peak amplitude must be finite and nonnegative");
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) throw DomainError("noise variance must be finite and positive");
}

ChannelParams ChannelParams::from_snr(double snr, double noise_variance) {
  if (!(snr >= 0.0)) throw DomainError("snr must be nonnegative");
  return ChannelParams(std::sqrt(snr * noise_variance), noise_variance);
}

double coherent_term(double snr, double gamma, double tail) {
  if (!(snr > 0.0)) throw DomainError("coherent term needs snr > 0");
  if (!(gamma > 0.0)) throw DomainError("coherent term needs gamma > 0");
  if (!(tail >= 0.0 && tail <= 1.0)) throw DomainError("tail probability must lie in [0, 1]");
  return tail * std::log(snr) - tail * (1.0 - 2.0 * std::log(gamma));
}

double penalty_spectral(const SpectralDistribution& spectrum, double snr) {
  if (!(snr > 0.0)) throw DomainError("penalty needs snr > 0");
  double acc = 0.0;
  for (const auto& piece : spectrum.pieces()) {
    const auto& s = piece.support();
    if (piece.is_constant()) {
      acc += s.length() * std::log1p(snr * std::max(piece.constant_value(), 0.0));
      continue;
    }
    auto integrand = [&](double x) { return std::log1p(snr * std::max(piece(x), 0.0)); };
    // Zeros of the density are where ln(1 + snr f) is sharpest; split there.
    std::vector<double> breaks{s.lo};
    const auto zeros = piece.level_candidates(0.0);
    breaks.insert(breaks.end(), zeros.begin(), zeros.end());
    breaks.push_back(s.hi);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double width = breaks[i + 1] - breaks[i];
      if (width <= 0.0) continue;
      acc += integrate(integrand, breaks[i], breaks[i + 1], 1e-10 * width / s.length()).value;
    }
  }
  return acc;
}

double penalty_logdet(const SpectralDistribution& spectrum, double snr, Eigen::Index n) {
  if (!(snr > 0.0)) throw DomainError("penalty needs snr > 0");
  const CovarianceMatrix k = toeplitz_covariance(spectrum, n);
  MatrixXcd shifted = snr * k.entries();
  shifted.diagonal().array() += 1.0;
  return log_det_hpd(shifted) / static_cast<double>(n);
}

BoundReport capacity_lower_bound(const FadingModel& model, double snr, double gamma) {
  BoundReport report;
  report.snr = snr;
  report.gamma = gamma;
  report.tail = marginal_tail(model, gamma).value;
  report.coherent = coherent_term(snr, gamma, report.tail);
  report.penalty_spectral = penalty_spectral(model.spectral(), snr);
  report.bound = report.coherent - report.penalty_spectral;
  return report;
}

std::pair<double, double> maximize_coherent_term(const FadingModel& model, double snr) {
  if (!(snr > 0.0)) throw DomainError("coherent term needs snr > 0");
  const auto best = maximize_over_gamma(
      [&](double gamma) { return coherent_term(snr, gamma, marginal_tail(model, gamma).value); });
  return {best.gamma, best.value};
}

GammaOptimum optimize_gamma(const FadingModel& model, double snr) {
  if (!(snr > 1.0)) throw DomainError("gamma optimization needs snr > 1");
  const double penalty = penalty_spectral(model.spectral(), snr);
  const auto [gamma, coherent] = maximize_coherent_term(model, snr);
  BoundReport report;
  report.snr = snr;
  report.gamma = gamma;
  report.tail = marginal_tail(model, gamma).value;
  report.coherent = coherent;
  report.penalty_spectral = penalty;
  report.bound = coherent - penalty;
  return {gamma, report};
}

}  // namespace prelog
