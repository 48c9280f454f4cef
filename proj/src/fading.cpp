#include "prelog/fading.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "prelog/errors.hpp"
#include "prelog/numeric.hpp"
#include "prelog/parallel.hpp"
#include "prelog/quadrature.hpp"

namespace prelog {

using cd = std::complex<double>;

struct MagnitudeCache {
  std::once_flag empirical_once;
  std::vector<double> empirical;
  std::once_flag enumerated_once;
  std::vector<double> enumerated;
};

namespace {

constexpr std::size_t kChunk = std::size_t{1} << 16;

std::vector<cd> normalized_taps(std::vector<cd> taps) {
  if (taps.empty()) throw DomainError("filter needs at least one tap");
  double energy = 0.0;
  for (const cd& t : taps) energy += std::norm(t);
  if (!(energy > 0.0) || !std::isfinite(energy)) throw DomainError("filter taps must have positive finite energy");
  const double scale = 1.0 / std::sqrt(energy);
  for (cd& t : taps) t *= scale;
  return taps;
}

cd draw_innovation(InnovationLaw law, Rng& rng) {
  switch (law) {
    case InnovationLaw::ComplexGaussian:
      return complex_normal(rng);
    case InnovationLaw::UnitModulusUniformPhase:
      return cis_turns(uniform01(rng));
    case InnovationLaw::FourPointPhase:
      switch (rng() >> 62) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
      }
  }
  return {};
}

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Eigenvalues of the minimal Hermitian circulant whose first n lags match
// the autocovariance: c_j = r(j) for j <= M/2, c_{M-j} = conj(r(j)).
std::vector<double> exact_embedding_eigenvalues(const SpectralDistribution& spectrum, std::size_t order) {
  const std::size_t half = order / 2;
  std::vector<cd> column(order);
  for (std::size_t j = 0; j <= half; ++j) column[j] = autocovariance(spectrum, static_cast<std::int64_t>(j));
  column[half] = column[half].real();
  for (std::size_t j = 1; j < half; ++j) column[order - j] = std::conj(column[j]);
  Eigen::FFT<double> fft;
  std::vector<cd> spectrum_values;
  fft.fwd(spectrum_values, column);
  std::vector<double> out(order);
  for (std::size_t k = 0; k < order; ++k) out[k] = spectrum_values[k].real();
  return out;
}

// Eigenvalue k = M * (spectral mass of the DFT bin centred on k/M), with
// the bin at 1/2 wrapping around to -1/2.
std::vector<double> binned_embedding_eigenvalues(const SpectralDistribution& spectrum, std::size_t order) {
  const double m = static_cast<double>(order);
  std::vector<double> edge_cdf(order);
  for (std::size_t t = 0; t < order; ++t) edge_cdf[t] = spectrum.continuous_cdf(-0.5 + (static_cast<double>(t) + 0.5) / m);
  const double total = spectrum.continuous_cdf(0.5);
  std::vector<double> out(order);
  for (std::size_t t = 0; t < order; ++t) {
    const double mass = t == 0 ? edge_cdf[0] + (total - edge_cdf[order - 1]) : edge_cdf[t] - edge_cdf[t - 1];
    out[(t + order / 2) % order] = m * std::max(mass, 0.0);
  }
  return out;
}

std::vector<cd> gaussian_path(const FadingModel& model, const GaussianCircular& gaussian, std::size_t n,
                              std::uint64_t seed, EmbeddingPolicy policy, EmbeddingInfo* info) {
  if (gaussian.spectrum.has_point_masses())
    throw UnsupportedModelError("Gaussian path simulation needs an absolutely continuous spectrum (point masses make the process non-ergodic)");

  const std::size_t base = std::max<std::size_t>(next_power_of_two(8 * n), 2);
  std::vector<double> eigenvalues;
  EmbeddingInfo local;
  for (std::size_t order = base; order <= kMaxEmbeddingOrder; order *= 2) {
    auto candidate = exact_embedding_eigenvalues(gaussian.spectrum, order);
    const auto [lo, hi] = std::minmax_element(candidate.begin(), candidate.end());
    local = {order, true, *lo};
    if (*lo >= -1e-10 * std::max(*hi, 1.0)) {
      eigenvalues = std::move(candidate);
      break;
    }
  }
  if (eigenvalues.empty()) {
    if (policy == EmbeddingPolicy::Exact) {
      std::ostringstream msg;
      msg << "circulant embedding of order <= " << kMaxEmbeddingOrder << " is not positive semi-definite"
          << " (min eigenvalue " << local.min_eigenvalue << ")";
      throw NumericalError(msg.str());
    }
    local.order = base;
    local.exact = false;
    eigenvalues = binned_embedding_eigenvalues(gaussian.spectrum, base);
  }
  if (info) *info = local;

  const std::size_t order = eigenvalues.size();
  Rng rng(derive_seed(seed, 0));
  std::vector<cd> weighted(order);
  for (std::size_t k = 0; k < order; ++k) weighted[k] = std::sqrt(std::max(eigenvalues[k], 0.0)) * complex_normal(rng);
  Eigen::FFT<double> fft;
  std::vector<cd> field;
  fft.inv(field, weighted);  // includes the 1/M factor
  const double scale = std::sqrt(static_cast<double>(order));
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = model.mean() + scale * field[k];
  return out;
}

std::vector<cd> filtered_path(const FadingModel& model, const FilteredInnovations& filtered, std::size_t n,
                              std::uint64_t seed) {
  const std::size_t len = filtered.taps.size();
  Rng rng(derive_seed(seed, 0));
  std::vector<cd> innovations(n + len - 1);
  for (cd& w : innovations) w = draw_innovation(filtered.law, rng);
  std::vector<cd> out(n, model.mean());
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < len; ++j) out[k] += filtered.taps[j] * innovations[k + len - 1 - j];
  return out;
}

// exp(-x) I_0(x), x >= 0.
double scaled_bessel_i0(double x) {
  if (x < 700.0) return std::exp(-x) * std::cyl_bessel_i(0.0, x);
  return (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x)) / std::sqrt(2.0 * std::numbers::pi * x);
}

// P(|H| >= gamma) for H ~ CN(d, 1): Rice law with scale 1/sqrt(2).
double rice_tail(double offset, double gamma) {
  if (offset == 0.0) return std::exp(-gamma * gamma);
  auto density = [offset](double r) {
    return 2.0 * r * std::exp(-(r - offset) * (r - offset)) * scaled_bessel_i0(2.0 * r * offset);
  };
  const double upper = std::max(gamma, offset) + 12.0;
  return std::clamp(integrate(density, gamma, upper, 1e-14).value, 0.0, 1.0);
}

double count_tail(const std::vector<double>& sorted, double gamma) {
  const auto first = std::lower_bound(sorted.begin(), sorted.end(), gamma);
  return static_cast<double>(sorted.end() - first) / static_cast<double>(sorted.size());
}

}  // namespace

std::string to_string(InnovationLaw law) {
  switch (law) {
    case InnovationLaw::ComplexGaussian: return "complex-gaussian";
    case InnovationLaw::UnitModulusUniformPhase: return "unit-modulus";
    case InnovationLaw::FourPointPhase: return "four-point-phase";
  }
  return "unknown";
}

InnovationLaw innovation_law_from_string(const std::string& name) {
  if (name == "complex-gaussian") return InnovationLaw::ComplexGaussian;
  if (name == "unit-modulus") return InnovationLaw::UnitModulusUniformPhase;
  if (name == "four-point-phase") return InnovationLaw::FourPointPhase;
  throw DomainError("unknown innovation law '" + name + "'");
}

std::vector<cd> filter_autocorrelation(const std::vector<cd>& taps) {
  std::vector<cd> out(taps.size());
  for (std::size_t m = 0; m < taps.size(); ++m)
    for (std::size_t j = m; j < taps.size(); ++j) out[m] += taps[j] * std::conj(taps[j - m]);
  return out;
}

FadingModel::FadingModel(cd mean, GaussianCircular gaussian)
    : mean_(mean), kind_(gaussian), spectral_(std::move(gaussian.spectrum)), cache_(std::make_shared<MagnitudeCache>()) {}

FadingModel::FadingModel(cd mean, FilteredInnovations filtered)
    : mean_(mean),
      kind_(FilteredInnovations{normalized_taps(std::move(filtered.taps)), filtered.law}),
      spectral_(SpectralDistribution::trigonometric(filter_autocorrelation(std::get<FilteredInnovations>(kind_).taps))),
      cache_(std::make_shared<MagnitudeCache>()) {}

bool FadingModel::has_gaussian_marginal() const {
  if (std::holds_alternative<GaussianCircular>(kind_)) return true;
  return std::get<FilteredInnovations>(kind_).law == InnovationLaw::ComplexGaussian;
}

std::string FadingModel::id() const {
  std::ostringstream out;
  out.precision(6);
  if (std::holds_alternative<GaussianCircular>(kind_)) {
    out << "gaussian";
  } else {
    const auto& f = std::get<FilteredInnovations>(kind_);
    out << "fir[" << f.taps.size() << "," << to_string(f.law) << "]";
  }
  if (mean_ != cd{}) out << "+d(" << mean_.real() << "," << mean_.imag() << ")";
  return out.str();
}

const std::vector<double>& FadingModel::magnitude_sample() const {
  std::call_once(cache_->empirical_once, [this] {
    const std::size_t chunks = (kEmpiricalDraws + kChunk - 1) / kChunk;
    std::vector<double> sample(kEmpiricalDraws);
    parallel_for(chunks, [&](std::size_t c) {
      Rng rng(derive_seed(kEmpiricalSeed, c));
      const std::size_t end = std::min(kEmpiricalDraws, (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) sample[i] = std::abs(sample_marginal(*this, rng));
    });
    std::sort(sample.begin(), sample.end());
    cache_->empirical = std::move(sample);
  });
  return cache_->empirical;
}

const std::vector<double>& FadingModel::enumerated_magnitudes() const {
  std::call_once(cache_->enumerated_once, [this] {
    const auto* f = std::get_if<FilteredInnovations>(&kind_);
    if (!f || f->law != InnovationLaw::FourPointPhase || f->taps.size() > kMaxEnumeratedTaps) return;
    static constexpr cd kPoints[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const std::size_t len = f->taps.size();
    const std::size_t outcomes = std::size_t{1} << (2 * len);
    std::vector<double> values(outcomes);
    for (std::size_t code = 0; code < outcomes; ++code) {
      cd h = mean_;
      for (std::size_t j = 0; j < len; ++j) h += f->taps[j] * kPoints[(code >> (2 * j)) & 3];
      values[code] = std::abs(h);
    }
    std::sort(values.begin(), values.end());
    cache_->enumerated = std::move(values);
  });
  return cache_->enumerated;
}

FadingModel gaussian_model(SpectralDistribution spectrum, cd mean) {
  return FadingModel(mean, GaussianCircular{std::move(spectrum)});
}

FadingModel fir_model(std::vector<cd> taps, InnovationLaw law, cd mean) {
  return FadingModel(mean, FilteredInnovations{std::move(taps), law});
}

SamplePath simulate_path(const FadingModel& model, std::size_t n, std::uint64_t seed, EmbeddingPolicy policy,
                         EmbeddingInfo* info) {
  if (n == 0) throw DomainError("path length must be positive");
  SamplePath path{{}, model.id(), seed};
  if (const auto* g = std::get_if<GaussianCircular>(&model.kind())) {
    path.values = gaussian_path(model, *g, n, seed, policy, info);
  } else {
    path.values = filtered_path(model, std::get<FilteredInnovations>(model.kind()), n, seed);
    if (info) *info = {};
  }
  return path;
}

cd sample_marginal(const FadingModel& model, Rng& rng) {
  if (std::holds_alternative<GaussianCircular>(model.kind())) return model.mean() + complex_normal(rng);
  const auto& f = std::get<FilteredInnovations>(model.kind());
  cd h = model.mean();
  for (const cd& tap : f.taps) h += tap * draw_innovation(f.law, rng);
  return h;
}

TailProbability marginal_tail(const FadingModel& model, double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("tail threshold must be nonnegative");
  if (gamma == 0.0) return {1.0, 0.0, true};
  if (model.has_gaussian_marginal()) return {rice_tail(std::abs(model.mean()), gamma), 0.0, true};

  const auto& f = std::get<FilteredInnovations>(model.kind());
  if (f.law == InnovationLaw::UnitModulusUniformPhase && f.taps.size() == 1) {
    // |d + e^{i phi}| with |tap| = 1 after normalization.
    const double offset = std::abs(model.mean());
    if (offset == 0.0) return {gamma <= 1.0 ? 1.0 : 0.0, 0.0, true};
    const double threshold = (gamma * gamma - offset * offset - 1.0) / (2.0 * offset);
    return {std::acos(std::clamp(threshold, -1.0, 1.0)) / std::numbers::pi, 0.0, true};
  }
  if (const auto& enumerated = model.enumerated_magnitudes(); !enumerated.empty())
    return {count_tail(enumerated, gamma), 0.0, true};

  const auto& sample = model.magnitude_sample();
  const double p = count_tail(sample, gamma);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(sample.size())), false};
}

ZeroMassEstimate zero_mass_check(const FadingModel& model, double eps, std::size_t samples, std::uint64_t seed) {
  if (!(eps > 0.0)) throw DomainError("zero-mass check needs eps > 0");
  if (samples < 1000) throw DomainError("zero-mass check needs at least 1000 samples");
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::size_t> hits(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(derive_seed(seed, c));
    const std::size_t end = std::min(samples, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i)
      if (std::abs(sample_marginal(model, rng)) < eps) ++hits[c];
  });
  std::size_t total = 0;
  for (const auto h : hits) total += h;
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(total) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), samples};
}

}  // namespace prelog
