#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "prelog/bounds.hpp"
#include "prelog/fading.hpp"

namespace prelog {

/// IID inputs: circularly symmetric with |X|^2 uniform on [0, A^2].
struct InputBatch {
  std::vector<std::complex<double>> values;
  double peak = 0.0;
};

InputBatch sample_inputs(std::size_t n, double peak, std::uint64_t seed);

/// Y_k = H_k x_k + Z_k with IID CN(0, noise_variance) noise. A zero noise
/// variance is accepted and gives the noiseless product.
std::vector<std::complex<double>> simulate_channel(const InputBatch& inputs, std::span<const std::complex<double>> fading,
                                                   double noise_variance, std::uint64_t seed);
std::vector<std::complex<double>> simulate_channel(const InputBatch& inputs, const SamplePath& fading,
                                                   double noise_variance, std::uint64_t seed);

struct EntropyEstimate {
  double value = 0.0;  // nats
  double standard_error = 0.0;
  std::size_t sample_count = 0;
  int neighbor_order = 0;
};

/// Kozachenko-Leonenko k-nearest-neighbour differential entropy of complex
/// samples (treated as points in R^2), with 10-fold delete-a-group
/// jackknife standard error. Throws DegenerateSampleError if more than 1%
/// of the samples repeat an earlier one.
EntropyEstimate estimate_entropy(std::span<const std::complex<double>> samples, int k = 4);

/// h(first) - h(second) for paired samples, jackknifed over the same folds.
EntropyEstimate estimate_entropy_difference(std::span<const std::complex<double>> first,
                                            std::span<const std::complex<double>> second, int k = 4);

/// Point estimate only (no jackknife).
double kozachenko_leonenko(std::span<const std::complex<double>> samples, int k = 4);

/// Estimate of I(X_1;Y_1|H_1) = E_h[h(hX + Z)] - h(Z), stratified over
/// `strata` independent fading draws with N / strata channel uses each. Both
/// entropies are k-NN estimates on the same noise draws. The standard error
/// is the spread of the per-stratum estimates.
EntropyEstimate estimate_coherent_mi(const FadingModel& model, const ChannelParams& params, std::size_t samples,
                                     std::uint64_t seed, int strata = 64, int k = 4);

/// Same estimate with the fading fixed to `fading` in a single stratum.
EntropyEstimate estimate_fixed_fading_mi(std::complex<double> fading, const ChannelParams& params, std::size_t samples,
                                         std::uint64_t seed, int k = 4);

struct SpectrumEstimate {
  std::vector<double> frequencies;  // ascending, spacing 1/L, starting at -1/2
  std::vector<double> density;
};

/// Welch estimate of the spectral density of H_k - mean: Hann window, 50%
/// overlap, scaled so that sum(density) / L equals the sample variance.
SpectrumEstimate empirical_spectrum(const SamplePath& path, std::size_t segment_length);

}  // namespace prelog
