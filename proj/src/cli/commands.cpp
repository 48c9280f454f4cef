#include "prelog/cli/commands.hpp"

#include <cmath>
#include <numbers>

#include "prelog/asymptotics.hpp"
#include "prelog/bounds.hpp"
#include "prelog/errors.hpp"
#include "prelog/mcsim.hpp"
#include "prelog/parallel.hpp"

namespace prelog::cli {

namespace {

struct Units {
  bool bits;
  std::string column(const std::string& stem) const { return stem + (bits ? "_bits" : "_nats"); }
  std::string value(double nats) const { return format_number(bits ? nats / std::numbers::ln2 : nats); }
};

std::string ratio_cell(double clamped, double snr) {
  const double l = std::log(snr);
  return l > 0.0 ? format_number(clamped / l) : "";
}

RunResult run_bound(const Scenario& s, const FadingModel& model, Units u) {
  CsvTable table({"snr", "gamma", "tail", u.column("coherent"), u.column("penalty"), u.column("bound"),
                  u.column("bound_clamped"), "ratio"});
  std::vector<BoundReport> reports(s.snr_grid.size());
  parallel_for(s.snr_grid.size(), [&](std::size_t i) {
    const double snr = s.snr_grid[i];
    const double gamma = s.fixed_gamma ? *s.fixed_gamma : maximize_coherent_term(model, snr).first;
    reports[i] = capacity_lower_bound(model, snr, gamma);
  });
  for (const auto& r : reports)
    table.add_row({format_number(r.snr), format_number(r.gamma), format_number(r.tail), u.value(r.coherent),
                   u.value(r.penalty_spectral), u.value(r.bound), u.value(r.clamped()), ratio_cell(r.clamped(), r.snr)});
  return {std::move(table), {}};
}

RunResult run_prelog(const Scenario& s, const FadingModel& model, Units u) {
  try {
    require_asymptotic_grid(s.snr_grid, 4);
  } catch (const DomainError& e) {
    throw ScenarioError("/snr_grid", e.what());
  }
  const GammaMode mode = s.fixed_gamma ? GammaMode{FixedGamma{*s.fixed_gamma}} : GammaMode{OptimizedGamma{}};
  const auto estimate = prelog_lower_estimate(model, s.snr_grid, mode);

  CsvTable table({"snr", "gamma", "tail", u.column("bound"), u.column("bound_clamped"), "ratio"});
  for (std::size_t i = 0; i < estimate.snr_grid.size(); ++i) {
    const auto& r = estimate.reports[i];
    table.add_row({format_number(r.snr), format_number(r.gamma), format_number(r.tail), u.value(r.bound),
                   u.value(r.clamped()), format_number(estimate.ratios[i])});
  }
  const double target = gaussian_prelog(model.spectral());
  const bool pass = estimate.intercept >= target - s.tolerances.prelog;
  return {std::move(table),
          {"prelog_estimate=" + format_number(estimate.intercept) + "±" + format_number(s.tolerances.prelog) +
           " target=" + format_number(target) + (pass ? " PASS" : " FAIL")}};
}

RunResult run_szego(const Scenario& s, const FadingModel& model, Units u) {
  const auto& spectrum = model.spectral();
  const std::string note = spectrum.has_point_masses() ? "integral excludes point masses" : "";
  const std::size_t per_snr = s.n_list.size();
  std::vector<double> logdet(s.snr_grid.size() * per_snr);
  parallel_for(logdet.size(), [&](std::size_t i) {
    const double snr = s.snr_grid[i / per_snr];
    const std::size_t n = s.n_list[i % per_snr];
    try {
      logdet[i] = penalty_logdet(spectrum, snr, static_cast<Eigen::Index>(n));
    } catch (const NumericalError& e) {
      throw NumericalError("snr=" + format_number(snr) + " n=" + std::to_string(n) + ": " + e.what());
    }
  });

  CsvTable table({"snr", "n", u.column("penalty_logdet"), u.column("penalty_spectral"), u.column("gap"), "warning"});
  for (std::size_t j = 0; j < s.snr_grid.size(); ++j) {
    const double snr = s.snr_grid[j];
    const double spectral = penalty_spectral(spectrum, snr);
    for (std::size_t k = 0; k < per_snr; ++k) {
      const double value = logdet[j * per_snr + k];
      table.add_row({format_number(snr), std::to_string(s.n_list[k]), u.value(value), u.value(spectral),
                     u.value(value - spectral), note});
    }
  }
  return {std::move(table), {}};
}

RunResult run_mi(const Scenario& s, const FadingModel& model, Units u, std::uint64_t seed) {
  if (s.samples < 10'000) throw ScenarioError("/samples", "mi needs samples >= 10000");
  CsvTable table({"snr", u.column("mi_estimate"), u.column("se"), u.column("analytic_bound"), u.column("margin"), "pass"});
  for (std::size_t i = 0; i < s.snr_grid.size(); ++i) {
    const double snr = s.snr_grid[i];
    const auto params = ChannelParams::from_snr(snr, s.noise_variance);
    const auto est = estimate_coherent_mi(model, params, s.samples, derive_seed(seed, i));
    const double bound = s.fixed_gamma ? coherent_term(snr, *s.fixed_gamma, marginal_tail(model, *s.fixed_gamma).value)
                                       : maximize_coherent_term(model, snr).second;
    const double margin = est.value - bound;
    const bool pass = margin >= -s.tolerances.mi_sigmas * est.standard_error;
    table.add_row({format_number(snr), u.value(est.value), u.value(est.standard_error), u.value(bound), u.value(margin),
                   pass ? "true" : "false"});
  }
  return {std::move(table), {}};
}

RunResult run_spectrum_check(const Scenario& s, const FadingModel& model, std::uint64_t seed) {
  const auto path = simulate_path(model, s.path_length, seed);
  const auto est = empirical_spectrum(path, s.segment_length);
  CsvTable table({"frequency", "empirical_density", "model_density"});
  for (std::size_t i = 0; i < est.frequencies.size(); ++i)
    table.add_row({format_number(est.frequencies[i]), format_number(est.density[i]),
                   format_number(density_at(model.spectral(), est.frequencies[i]))});
  return {std::move(table), {}};
}

}  // namespace

std::optional<Command> command_from_string(std::string_view name) {
  if (name == "bound") return Command::Bound;
  if (name == "prelog") return Command::Prelog;
  if (name == "szego") return Command::Szego;
  if (name == "mi") return Command::Mi;
  if (name == "spectrum-check") return Command::SpectrumCheck;
  return std::nullopt;
}

std::string to_string(Command command) {
  switch (command) {
    case Command::Bound: return "bound";
    case Command::Prelog: return "prelog";
    case Command::Szego: return "szego";
    case Command::Mi: return "mi";
    case Command::SpectrumCheck: return "spectrum-check";
  }
  return "";
}

RunResult run_command(Command command, const Scenario& scenario, const RunOptions& options) {
  const FadingModel model = build_model(scenario.model);
  const Units units{options.bits};
  const std::uint64_t seed = options.seed.value_or(scenario.seed);
  switch (command) {
    case Command::Bound: return run_bound(scenario, model, units);
    case Command::Prelog: return run_prelog(scenario, model, units);
    case Command::Szego: return run_szego(scenario, model, units);
    case Command::Mi: return run_mi(scenario, model, units, seed);
    case Command::SpectrumCheck: return run_spectrum_check(scenario, model, seed);
  }
  throw std::logic_error("unhandled command");
}

}  // namespace prelog::cli
