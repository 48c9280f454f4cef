#include "prelog/mcsim.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

#include "prelog/errors.hpp"
#include "prelog/numeric.hpp"
#include "prelog/parallel.hpp"

namespace prelog {

using cd = std::complex<double>;

InputBatch sample_inputs(std::size_t n, double peak, std::uint64_t seed) {
  if (n == 0) throw DomainError("input batch needs n >= 1");
  if (!(peak > 0.0)) throw DomainError("peak amplitude must be positive");
  Rng rng(derive_seed(seed, 0));
  InputBatch batch{std::vector<cd>(n), peak};
  for (cd& x : batch.values) {
    const double power = uniform01(rng);
    x = peak * std::sqrt(power) * cis_turns(uniform01(rng));
  }
  return batch;
}

std::vector<cd> simulate_channel(const InputBatch& inputs, std::span<const cd> fading, double noise_variance,
                                 std::uint64_t seed) {
  if (inputs.values.size() != fading.size()) throw DomainError("input and fading lengths differ");
  if (!(noise_variance >= 0.0)) throw DomainError("noise variance must be nonnegative");
  std::vector<cd> out(fading.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fading[k] * inputs.values[k];
  if (noise_variance > 0.0) {
    Rng rng(derive_seed(seed, 0));
    const double sigma = std::sqrt(noise_variance);
    for (cd& y : out) y += sigma * complex_normal(rng);
  }
  return out;
}

std::vector<cd> simulate_channel(const InputBatch& inputs, const SamplePath& fading, double noise_variance,
                                 std::uint64_t seed) {
  return simulate_channel(inputs, std::span<const cd>(fading.values), noise_variance, seed);
}

namespace {

struct ChannelDraw {
  std::vector<cd> outputs;
  std::vector<cd> noise;
};

ChannelDraw draw_channel(cd fading, const ChannelParams& params, std::size_t count, Rng& rng) {
  const double sigma = std::sqrt(params.noise_variance());
  ChannelDraw draw{std::vector<cd>(count), std::vector<cd>(count)};
  for (std::size_t i = 0; i < count; ++i) {
    const double power = uniform01(rng);
    const cd x = params.peak_amplitude() * std::sqrt(power) * cis_turns(uniform01(rng));
    draw.noise[i] = sigma * complex_normal(rng);
    draw.outputs[i] = fading * x + draw.noise[i];
  }
  return draw;
}

}  // namespace

EntropyEstimate estimate_coherent_mi(const FadingModel& model, const ChannelParams& params, std::size_t samples,
                                     std::uint64_t seed, int strata, int k) {
  if (samples < 10'000) throw DomainError("coherent MI estimation needs N >= 10^4");
  if (strata < 2 || static_cast<std::size_t>(strata) * 100 > samples)
    throw DomainError("need at least 2 strata of at least 100 samples");

  const auto m = static_cast<std::size_t>(strata);
  std::vector<double> per_stratum(m);
  parallel_for(m, [&](std::size_t s) {
    Rng rng(derive_seed(seed, s));
    const cd h = sample_marginal(model, rng);
    const std::size_t count = samples / m + (s < samples % m ? 1 : 0);
    const auto draw = draw_channel(h, params, count, rng);
    per_stratum[s] = kozachenko_leonenko(draw.outputs, k) - kozachenko_leonenko(draw.noise, k);
  });

  double mean = 0.0;
  for (const double v : per_stratum) mean += v;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (const double v : per_stratum) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
  return {mean, se, samples, k};
}

EntropyEstimate estimate_fixed_fading_mi(cd fading, const ChannelParams& params, std::size_t samples,
                                         std::uint64_t seed, int k) {
  Rng rng(derive_seed(seed, 0));
  const auto draw = draw_channel(fading, params, samples, rng);
  return estimate_entropy_difference(draw.outputs, draw.noise, k);
}

SpectrumEstimate empirical_spectrum(const SamplePath& path, std::size_t segment_length) {
  const std::size_t len = segment_length;
  if (len < 2 || (len & (len - 1)) != 0) throw DomainError("segment length must be a power of two");
  const auto& h = path.values;
  if (h.size() < 8 * len) throw DomainError("path must hold at least 8 segments");

  cd shift = 0.0;
  for (const cd& v : h) shift += v - h.front();
  const cd mean = h.front() + shift / static_cast<double>(h.size());
  double variance = 0.0;
  for (const cd& v : h) variance += std::norm(v - mean);
  variance /= static_cast<double>(h.size());

  std::vector<double> window(len);
  double window_energy = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    window[j] = 0.5 * (1.0 - cospi(2.0 * static_cast<double>(j) / static_cast<double>(len)));
    window_energy += window[j] * window[j];
  }

  Eigen::FFT<double> fft;
  std::vector<double> power(len, 0.0);
  std::vector<cd> segment(len), transformed;
  std::size_t segments = 0;
  for (std::size_t start = 0; start + len <= h.size(); start += len / 2, ++segments) {
    for (std::size_t j = 0; j < len; ++j) segment[j] = window[j] * (h[start + j] - mean);
    fft.fwd(transformed, segment);
    for (std::size_t k = 0; k < len; ++k) power[k] += std::norm(transformed[k]);
  }

  SpectrumEstimate out;
  out.frequencies.resize(len);
  out.density.resize(len);
  double total = 0.0;
  for (std::size_t t = 0; t < len; ++t) {
    out.frequencies[t] = -0.5 + static_cast<double>(t) / static_cast<double>(len);
    out.density[t] = power[(t + len / 2) % len] / (static_cast<double>(segments) * window_energy);
    total += out.density[t];
  }
  total /= static_cast<double>(len);
  const double scale = total > 0.0 ? variance / total : 0.0;
  for (double& d : out.density) d *= scale;
  return out;
}

}  // namespace prelog
