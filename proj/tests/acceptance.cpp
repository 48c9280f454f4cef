#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "prelog/asymptotics.hpp"
#include "prelog/bounds.hpp"
#include "prelog/fading.hpp"
#include "prelog/linalg.hpp"
#include "prelog/mcsim.hpp"
#include "prelog/rng.hpp"
#include "test_support.hpp"

using namespace prelog;
using cd = std::complex<double>;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::vector<double> decades(int first, int last, int step) {
  std::vector<double> grid;
  for (int e = first; e <= last; e += step) grid.push_back(std::pow(10.0, e));
  return grid;
}

SpectralDistribution bands(std::vector<std::pair<Interval, double>> pieces, std::vector<PointMass> masses = {}) {
  std::vector<DensityPiece> out;
  for (const auto& [interval, density] : pieces) out.push_back(DensityPiece::constant(interval, density));
  return SpectralDistribution(std::move(out), std::move(masses));
}

Outcome gaussian_prelog_formula() {
  struct Case {
    const char* name;
    SpectralDistribution spectrum;
    double flat;
  };
  const std::vector<Case> cases{
      {"flat band 0.1", SpectralDistribution::flat_band(0.1), 0.8},
      {"flat band 0.25", SpectralDistribution::flat_band(0.25), 0.5},
      {"flat band 0.4", SpectralDistribution::flat_band(0.4), 0.2},
      {"white", SpectralDistribution::white(), 0.0},
      {"two bands", bands({{{-0.4, -0.3}, 5.0}, {{0.1, 0.2}, 5.0}}), 0.8},
      {"one-sided band", bands({{{0.0, 0.5}, 2.0}}), 0.5},
      {"explicit zero piece", bands({{{-0.5, -0.2}, 0.0}, {{-0.2, 0.5}, 1.0 / 0.7}}), 0.3},
      {"steps covering the band", bands({{{-0.5, -0.1}, 0.5}, {{-0.1, 0.3}, 1.5}, {{0.3, 0.5}, 1.0}}), 0.0},
      {"band with atoms", bands({{{-0.05, 0.05}, 5.0}}, {{0.3, 0.25}, {-0.4, 0.25}}), 0.9},
      {"edge band", bands({{{0.3, 0.5}, 2.5}}, {{-0.1, 0.5}}), 0.8},
  };
  Outcome out;
  double worst = 0.0;
  for (const auto& c : cases) {
    const double error = std::abs(gaussian_prelog(c.spectrum) - c.flat);
    worst = std::max(worst, error);
    out.require(error <= 1e-12, fmt("%s off by %.3g", c.name, error));
  }
  if (out.pass) out.detail = fmt("%zu spectra, max error %.3g", cases.size(), worst);
  return out;
}

Outcome szego_convergence() {
  const auto band = SpectralDistribution::flat_band(0.25);
  const double snr = 1e4;
  const double spectral = penalty_spectral(band, snr);
  Outcome out;
  double previous = INFINITY;
  std::string gaps;
  for (const Eigen::Index n : {128, 256, 512, 1024, 2048}) {
    const double gap = std::abs(penalty_logdet(band, snr, n) - spectral);
    gaps += fmt("%s%.4g", gaps.empty() ? "" : " ", gap);
    out.require(gap <= previous, fmt("gap grew at n=%td", n));
    previous = gap;
  }
  out.require(previous < 0.1, fmt("gap at n=2048 is %.4g", previous));
  out.detail = (out.pass ? "" : out.detail + "; ") + "gaps " + gaps;
  return out;
}

Outcome limit_decomposition() {
  struct Case {
    const char* name;
    SpectralDistribution spectrum;
    double tolerance;
  };
  const std::vector<Case> cases{
      {"flat band", SpectralDistribution::flat_band(0.25), 0.02},
      {"sub-unit density with atom", bands({{{-0.5, 0.5}, 0.5}}, {{0.0, 0.5}}), 0.03},
      {"mixed", bands({{{-0.1, 0.1}, 3.0}, {{0.2, 0.5}, 0.5}}, {{-0.3, 0.25}}), 0.02},
  };
  Outcome out;
  std::string summary;
  for (const auto& c : cases) {
    const auto p = partition_measures(c.spectrum);
    const double target = p.mu_s2 + p.mu_s3;
    double previous = INFINITY;
    for (const double snr : {1e8, 1e10, 1e12}) {
      const double error = std::abs(penalty_ratio(c.spectrum, snr) - target);
      out.require(error <= previous, fmt("%s error grew at snr %.0e", c.name, snr));
      previous = error;
    }
    out.require(previous <= c.tolerance, fmt("%s error %.4g > %.2g", c.name, previous, c.tolerance));
    summary += fmt("%s%s %.4g/%.2g", summary.empty() ? "" : ", ", c.name, previous, c.tolerance);
  }
  out.detail = (out.pass ? "" : out.detail + "; ") + summary;
  return out;
}

Outcome prelog_bound_check() {
  const auto grid = decades(4, 16, 2);
  Outcome out;
  const auto band = prelog_lower_estimate(gaussian_model(SpectralDistribution::flat_band(0.25)), grid, OptimizedGamma{});
  for (std::size_t i = 1; i < band.ratios.size(); ++i)
    out.require(band.ratios[i] >= band.ratios[i - 1], fmt("ratio dropped at snr %.0e", grid[i]));
  out.require(std::abs(band.intercept - 0.5) <= 0.05, fmt("flat-band intercept %.4f", band.intercept));
  out.require(band.intercept >= 0.45, "flat-band intercept below 0.45");

  const auto white = prelog_lower_estimate(gaussian_model(SpectralDistribution::white()), grid, OptimizedGamma{});
  out.require(std::abs(white.intercept) <= 0.05, fmt("white intercept %.4f", white.intercept));
  out.detail = (out.pass ? "" : out.detail + "; ") +
               fmt("flat-band intercept %.4f, white intercept %.4f", band.intercept, white.intercept);
  return out;
}

Outcome coherent_inequality() {
  const std::vector<std::pair<const char*, FadingModel>> models{
      {"Rayleigh", gaussian_model(SpectralDistribution::white())},
      {"unit-modulus", fir_model({1.0}, InnovationLaw::UnitModulusUniformPhase)},
  };
  std::vector<double> gammas;
  for (int i = 0; i < 10; ++i) gammas.push_back(std::pow(10.0, (i - 6) / 6.0));

  Outcome out;
  int checks = 0, violations = 0;
  double tightest = INFINITY;
  for (const auto& [name, model] : models) {
    std::vector<double> tails;
    for (const double g : gammas) tails.push_back(marginal_tail(model, g).value);
    for (const double snr : {10.0, 100.0, 1000.0}) {
      const auto params = ChannelParams::from_snr(snr);
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto est = estimate_coherent_mi(model, params, 1'000'000, derive_seed(seed, std::uint64_t(snr)));
        for (std::size_t j = 0; j < gammas.size(); ++j) {
          const double margin = (est.value - coherent_term(snr, gammas[j], tails[j])) / est.standard_error;
          tightest = std::min(tightest, margin);
          ++checks;
          if (margin < -3.0) {
            ++violations;
            out.require(false, fmt("%s snr %g seed %llu gamma %.3g: %.2f SE", name, snr, (unsigned long long)seed,
                                   gammas[j], margin));
          }
        }
      }
    }
  }
  out.detail = (out.pass ? "" : out.detail + "; ") +
               fmt("%d checks, %d violations, smallest margin %.1f SE", checks, violations, tightest);
  return out;
}

MatrixXcd random_complex(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cd(normal(rng), normal(rng));
  return m;
}

Outcome matrix_properties() {
  Outcome out;
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_det = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + rng() % 12, m = 1 + rng() % 12;
    const MatrixXcd a = random_complex(rng, n, m), b = random_complex(rng, m, n);
    const cd left = (MatrixXcd::Identity(n, n) + a * b).determinant();
    const cd right = (MatrixXcd::Identity(m, m) + b * a).determinant();
    worst_det = std::max(worst_det, std::abs(left - right) / std::abs(left));
  }
  out.require(worst_det < 1e-9, fmt("determinant identity relative error %.3g", worst_det));

  double worst_excess = -INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    const auto spectrum = testing::random_piecewise_constant(rng);
    const Eigen::Index n = 1 + rng() % 32;
    const double peak = 0.1 + 5.0 * unit(rng), noise = 0.1 + 2.0 * unit(rng);
    const MatrixXcd k = toeplitz_covariance(spectrum, n).entries();
    MatrixXcd x = MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      x(i, i) = std::polar(peak * std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
    const MatrixXcd eye = MatrixXcd::Identity(n, n);
    const double lhs = log_det_hpd(MatrixXcd(eye + x * k * x.adjoint() / noise));
    const double rhs = log_det_hpd(MatrixXcd(eye + (peak * peak / noise) * k));
    worst_excess = std::max(worst_excess, lhs - rhs);
  }
  out.require(worst_excess <= 1e-10, fmt("log-det domination violated by %.3g", worst_excess));
  out.detail = (out.pass ? "" : out.detail + "; ") +
               fmt("det identity max rel error %.3g, domination max excess %.3g", worst_det, worst_excess);
  return out;
}

Outcome simulation_fidelity() {
  constexpr std::size_t n = 1 << 16;
  const auto spectrum = SpectralDistribution::flat_band(0.25);
  const auto path = simulate_path(gaussian_model(spectrum), n, 77);
  cd mean = 0.0;
  for (const cd& v : path.values) mean += v;
  mean /= double(n);

  // Bartlett standard error of a complex sample autocovariance.
  double var = std::norm(autocovariance(spectrum, 0));
  for (std::size_t j = 1; j < n; ++j)
    var += 2.0 * std::norm(autocovariance(spectrum, std::int64_t(j))) * (1.0 - double(j) / double(n));
  const double se = std::sqrt(var / double(n));

  Outcome out;
  double worst = 0.0;
  for (const std::size_t lag : {0, 1, 2, 4, 8}) {
    cd acc = 0.0;
    for (std::size_t k = 0; k + lag < n; ++k) acc += (path.values[k + lag] - mean) * std::conj(path.values[k] - mean);
    const double z = std::abs(acc / double(n) - autocovariance(spectrum, std::int64_t(lag))) / se;
    worst = std::max(worst, z);
    out.require(z < 5.0, fmt("lag %zu off by %.2f SE", lag, z));
  }

  const auto welch = empirical_spectrum(path, 256);
  double total = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < welch.density.size(); ++i) {
    total += welch.density[i];
    if (std::abs(welch.frequencies[i]) > 0.3) outside += welch.density[i];
  }
  out.require(outside < 0.05 * total, fmt("Welch mass outside 0.3 is %.3g", outside / total));

  const std::vector<cd> taps{0.8, {0.2, 0.4}, -0.3, {0.0, 0.1}};
  const auto four_point = fir_model(taps, InnovationLaw::FourPointPhase);
  const auto gaussian = gaussian_model(fir_model(taps, InnovationLaw::ComplexGaussian).spectral());
  const double k_diff = (toeplitz_covariance(four_point.spectral(), 128).entries() -
                         toeplitz_covariance(gaussian.spectral(), 128).entries())
                            .cwiseAbs()
                            .maxCoeff();
  out.require(k_diff <= 1e-12, fmt("covariance mismatch %.3g", k_diff));
  out.detail = (out.pass ? "" : out.detail + "; ") +
               fmt("worst lag %.2f SE, Welch outside %.2g%%, covariance diff %.2g", worst, 100.0 * outside / total,
                   k_diff);
  return out;
}

Outcome hypothesis_check() {
  Outcome out;
  const auto rayleigh = zero_mass_check(gaussian_model(SpectralDistribution::white()), 0.01, 1'000'000, 8);
  const double expected = -std::expm1(-1e-4);
  const double z = std::abs(rayleigh.estimate - expected) / rayleigh.standard_error;
  out.require(z <= 3.0, fmt("Rayleigh estimate %.4g vs %.4g (%.2f SE)", rayleigh.estimate, expected, z));
  const auto unit = zero_mass_check(fir_model({1.0}, InnovationLaw::UnitModulusUniformPhase), 0.01, 1'000'000, 9);
  out.require(unit.estimate == 0.0, fmt("unit-modulus estimate %.3g", unit.estimate));
  out.detail = (out.pass ? "" : out.detail + "; ") +
               fmt("Rayleigh %.4g vs %.4g (%.2f SE), unit-modulus %g", rayleigh.estimate, expected, z, unit.estimate);
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / ("prelog-acceptance-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto scenario = dir / "scenario.json";
  std::ofstream(scenario) << R"({
  "name": "determinism",
  "model": {"kind": "gaussian", "spectrum": {"preset": "flat_band", "half_width": 0.25}},
  "snr_grid": {"start": 1e4, "stop": 1e10, "points": 4},
  "seed": 99,
  "n_list": [64, 256],
  "samples": 20000,
  "path_length": 16384,
  "segment_length": 128
}
)";
  Outcome out;
  int compared = 0;
  for (const char* command : {"bound", "prelog", "szego", "mi", "spectrum-check"}) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "4", "4"}) {
      const auto csv = dir / (std::string(command) + "-" + threads + "-" + std::to_string(outputs.size()) + ".csv");
      const std::string line = std::string("PRELOG_LAB_THREADS=") + threads + " '" + PRELOG_LAB_BINARY + "' " + command +
                               " --scenario '" + scenario.string() + "' --out '" + csv.string() + "' > /dev/null";
      const int status = std::system(line.c_str());
      out.require(status == 0, fmt("%s exited with status %d", command, status));
      outputs.push_back(slurp(csv));
    }
    for (std::size_t i = 1; i < outputs.size(); ++i) {
      out.require(!outputs[0].empty() && outputs[i] == outputs[0], fmt("%s output differs on run %zu", command, i));
      ++compared;
    }
  }
  std::filesystem::remove_all(dir);
  out.detail = (out.pass ? "" : out.detail + "; ") + fmt("%d byte comparisons across 5 subcommands", compared);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"Gaussian pre-log formula", 1.0, gaussian_prelog_formula},
      {"Szego convergence", 60.0, szego_convergence},
      {"limit decomposition", 1.0, limit_decomposition},
      {"pre-log lower bound at desk scale", 5.0, prelog_bound_check},
      {"coherent-term inequality", 600.0, coherent_inequality},
      {"matrix-step properties", 5.0, matrix_properties},
      {"simulation fidelity", 30.0, simulation_fidelity},
      {"zero-mass hypothesis", 10.0, hypothesis_check},
      {"CLI determinism", 60.0, cli_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > criteria[i].budget_seconds)
      outcome.require(false, fmt("took %.1f s, budget %.0f s", seconds, criteria[i].budget_seconds));
    std::printf("%s %zu %s: %s (%.2f s)\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
