#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "prelog/rng.hpp"
#include "prelog/spectra.hpp"

namespace prelog {

/// Unit-variance law of the IID innovations driving a filtered model.
enum class InnovationLaw {
  ComplexGaussian,
  UnitModulusUniformPhase,
  FourPointPhase,  // equiprobable on {1, i, -1, -i}
};

std::string to_string(InnovationLaw law);
InnovationLaw innovation_law_from_string(const std::string& name);

/// {H_k - d} circularly-symmetric Gaussian with spectral distribution F.
struct GaussianCircular {
  SpectralDistribution spectrum;
};

/// H_k = d + sum_j taps[j] W_{k-j} with IID unit-variance innovations.
struct FilteredInnovations {
  std::vector<std::complex<double>> taps;
  InnovationLaw law = InnovationLaw::ComplexGaussian;
};

struct MagnitudeCache;

/// Stationary ergodic fading law with mean d and unit variance.
class FadingModel {
 public:
  using Kind = std::variant<GaussianCircular, FilteredInnovations>;

  FadingModel(std::complex<double> mean, GaussianCircular gaussian);
  /// Taps are rescaled to unit energy.
  FadingModel(std::complex<double> mean, FilteredInnovations filtered);

  std::complex<double> mean() const { return mean_; }
  const Kind& kind() const { return kind_; }
  const SpectralDistribution& spectral() const { return spectral_; }

  /// True when the marginal of H_1 is complex Gaussian (either kind).
  bool has_gaussian_marginal() const;
  std::string id() const;

  /// Sorted |H_1| draws backing empirical tails; computed once per model.
  const std::vector<double>& magnitude_sample() const;
  /// Sorted |H_1| over all equiprobable innovation outcomes, for
  /// FourPointPhase filters with at most kMaxEnumeratedTaps taps; empty
  /// otherwise.
  const std::vector<double>& enumerated_magnitudes() const;

  static constexpr std::size_t kMaxEnumeratedTaps = 8;

  static constexpr std::size_t kEmpiricalDraws = 1'000'000;
  static constexpr std::uint64_t kEmpiricalSeed = 0x5eed'f4d1'0000'0001ULL;

 private:
  std::complex<double> mean_;
  Kind kind_;
  SpectralDistribution spectral_;
  std::shared_ptr<MagnitudeCache> cache_;
};

FadingModel gaussian_model(SpectralDistribution spectrum, std::complex<double> mean = 0.0);
FadingModel fir_model(std::vector<std::complex<double>> taps, InnovationLaw law, std::complex<double> mean = 0.0);

/// Filter autocorrelation sum_j taps[j] conj(taps[j-m]), m = 0..len-1.
std::vector<std::complex<double>> filter_autocorrelation(const std::vector<std::complex<double>>& taps);

struct SamplePath {
  std::vector<std::complex<double>> values;
  std::string model_id;
  std::uint64_t seed = 0;
};

/// How Gaussian paths are drawn when the exact circulant embedding of the
/// autocovariance is indefinite (band-limited spectra with jumps).
enum class EmbeddingPolicy {
  /// Exact embedding only; NumericalError if no PSD embedding up to the cap.
  Exact,
  /// Fall back to a circulant whose eigenvalues are the spectral masses of
  /// the DFT bins. Lag-m autocovariance error is O((m/M)^2) plus O(1/M^2)
  /// per spectral jump.
  ExactOrBinnedSpectrum,
};

struct EmbeddingInfo {
  std::size_t order = 0;
  bool exact = true;
  double min_eigenvalue = 0.0;  // before clamping, exact attempt at `order`
};

inline constexpr std::size_t kMaxEmbeddingOrder = std::size_t{1} << 20;

/// Length-n stationary sample path; a pure function of (model, n, seed).
SamplePath simulate_path(const FadingModel& model, std::size_t n, std::uint64_t seed,
                         EmbeddingPolicy policy = EmbeddingPolicy::ExactOrBinnedSpectrum,
                         EmbeddingInfo* info = nullptr);

/// One draw of H_1 from the model's marginal law.
std::complex<double> sample_marginal(const FadingModel& model, Rng& rng);

struct TailProbability {
  double value = 0.0;
  double standard_error = 0.0;  // zero when exact
  bool exact = true;
};

/// P(|H_1| >= gamma).
TailProbability marginal_tail(const FadingModel& model, double gamma);

struct ZeroMassEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Empirical P(|H_1| < eps) with binomial standard error.
ZeroMassEstimate zero_mass_check(const FadingModel& model, double eps, std::size_t samples, std::uint64_t seed);

}  // namespace prelog
