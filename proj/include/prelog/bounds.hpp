#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "prelog/fading.hpp"
#include "prelog/spectra.hpp"

namespace prelog {

/// Peak amplitude A, noise variance sigma^2 and SNR = A^2 / sigma^2.
class ChannelParams {
 public:
  ChannelParams(double peak_amplitude, double noise_variance);
  static ChannelParams from_snr(double snr, double noise_variance = 1.0);

  double peak_amplitude() const { return peak_amplitude_; }
  double noise_variance() const { return noise_variance_; }
  double snr() const { return peak_amplitude_ * peak_amplitude_ / noise_variance_; }

 private:
  double peak_amplitude_;
  double noise_variance_;
};

/// One evaluation of the capacity lower bound, in nats per channel use.
struct BoundReport {
  double snr = 0.0;
  double gamma = 0.0;
  double tail = 0.0;  // P(|H_1| >= gamma)
  double coherent = 0.0;
  double penalty_spectral = 0.0;
  std::optional<std::pair<std::size_t, double>> penalty_logdet_n;
  double bound = 0.0;  // coherent - penalty_spectral, may be negative

  /// Capacity is nonnegative, so max(bound, 0) is also a lower bound.
  double clamped() const { return bound > 0.0 ? bound : 0.0; }
};

/// tail * ln(snr) - tail * (1 - ln(gamma^2)): lower bound on I(X_1;Y_1|H_1)
/// for circularly-symmetric inputs with |X|^2 uniform on [0, A^2].
double coherent_term(double snr, double gamma, double tail);

/// int ln(1 + snr F'(x)) dx over [-1/2, 1/2]. Closed form on constant
/// pieces, adaptive quadrature (absolute tolerance 1e-9) elsewhere.
double penalty_spectral(const SpectralDistribution& spectrum, double snr);

/// (1/n) ln det(I_n + snr K_HH) via Cholesky.
double penalty_logdet(const SpectralDistribution& spectrum, double snr, Eigen::Index n);

BoundReport capacity_lower_bound(const FadingModel& model, double snr, double gamma);

struct GammaOptimum {
  double gamma = 0.0;
  BoundReport report;
};

/// Maximizes the bound over gamma: 601-point log grid on [1e-6, 1e3],
/// then 50 golden-section steps on the bracket around the best grid point.
/// Requires snr > 1.
GammaOptimum optimize_gamma(const FadingModel& model, double snr);

/// Same search applied to the coherent term alone; any snr > 0.
std::pair<double, double> maximize_coherent_term(const FadingModel& model, double snr);

namespace gamma_search {
inline constexpr int kMinGammaExponent = -6;
inline constexpr int kMaxGammaExponent = 3;
inline constexpr int kGridPoints = 601;
inline constexpr int kGoldenIterations = 50;
}  // namespace gamma_search

}  // namespace prelog
