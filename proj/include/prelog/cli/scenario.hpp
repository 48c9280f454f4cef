#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "prelog/fading.hpp"

namespace prelog::cli {

/// Invalid scenario. `pointer` is the JSON pointer of the offending value
/// and `line` its 1-based line in the source text (0 when unknown).
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string pointer, const std::string& message, int line = 0);

  const std::string& pointer() const { return pointer_; }
  int line() const { return line_; }

 private:
  std::string pointer_;
  int line_;
};

struct PresetSpectrum {
  std::string name;         // "white" or "flat_band"
  double half_width = 0.0;  // flat_band only
  friend bool operator==(const PresetSpectrum&, const PresetSpectrum&) = default;
};

struct PieceSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> coefficients;  // polynomial in x; one entry for a constant density
  friend bool operator==(const PieceSpec&, const PieceSpec&) = default;
};

struct PiecewiseSpectrum {
  std::vector<PieceSpec> pieces;
  std::vector<PointMass> point_masses;
  friend bool operator==(const PiecewiseSpectrum&, const PiecewiseSpectrum&) = default;
};

struct TrigonometricSpectrum {
  std::vector<std::complex<double>> coefficients;
  friend bool operator==(const TrigonometricSpectrum&, const TrigonometricSpectrum&) = default;
};

using SpectrumSpec = std::variant<PresetSpectrum, PiecewiseSpectrum, TrigonometricSpectrum>;

struct GaussianSpec {
  SpectrumSpec spectrum;
  friend bool operator==(const GaussianSpec&, const GaussianSpec&) = default;
};

struct FirSpec {
  std::vector<std::complex<double>> taps;
  InnovationLaw innovation = InnovationLaw::ComplexGaussian;
  friend bool operator==(const FirSpec&, const FirSpec&) = default;
};

struct ModelSpec {
  std::variant<GaussianSpec, FirSpec> kind;
  std::complex<double> mean = 0.0;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct Tolerances {
  double prelog = 0.05;  // allowed shortfall of the intercept below the Gaussian pre-log
  double mi_sigmas = 3.0;
  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct Scenario {
  std::string name;
  ModelSpec model;
  std::vector<double> snr_grid;       // always expanded to an explicit list
  std::optional<double> fixed_gamma;  // empty means optimized
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  double noise_variance = 1.0;
  std::vector<std::int64_t> n_list{128, 256, 512, 1024, 2048};
  std::size_t samples = 1'000'000;
  std::size_t path_length = 1 << 16;
  std::size_t segment_length = 256;
  Tolerances tolerances;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline constexpr std::string_view kKnownOutputs[] = {"bound", "prelog", "szego", "mi", "spectrum-check"};

/// Parses and validates a scenario. Errors carry the line of the offending
/// value in `text`.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Line on which the value at `pointer` (or its nearest existing ancestor)
/// starts; 0 when `text` is not valid JSON.
int locate_line(std::string_view text, const std::string& pointer);
/// Copy of `error` with its line resolved against `text`.
ScenarioError with_source_line(const ScenarioError& error, std::string_view text);

/// Normalized form: presets kept, grids expanded, every field explicit.
nlohmann::ordered_json to_json(const Scenario& scenario);
std::string serialize(const Scenario& scenario);

SpectralDistribution build_spectrum(const SpectrumSpec& spec);
FadingModel build_model(const ModelSpec& spec);

}  // namespace prelog::cli
