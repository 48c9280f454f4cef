#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "prelog/cli/commands.hpp"
#include "prelog/cli/csv.hpp"
#include "prelog/cli/scenario.hpp"

using namespace prelog::cli;

namespace {

const std::filesystem::path kScenarioDir = std::filesystem::path(PRELOG_SOURCE_DIR) / "scenarios";

std::string white_scenario(const std::string& extra = "") {
  return R"({
  "name": "white",
  "model": {"kind": "gaussian", "spectrum": {"preset": "white"}},
  "snr_grid": [10, 100, 1000, 10000])" +
         extra + "\n}\n";
}

double cell(const CsvTable& table, std::size_t row, const std::string& column) {
  const auto& header = table.header();
  const auto it = std::find(header.begin(), header.end(), column);
  REQUIRE(it != header.end());
  return std::stod(table.rows().at(row).at(std::size_t(it - header.begin())));
}

// Pointer and line of the error raised by parse_scenario, or ("", -1).
std::pair<std::string, int> rejection(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return {e.pointer(), e.line()};
  }
  return {"", -1};
}

}  // namespace

TEST_CASE("format_number") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
  CHECK(format_number(1e16) == "1e+16");
  CHECK(format_number(-2.5) == "-2.5");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(std::numbers::pi) == "3.14159265359");
}

TEST_CASE("csv quoting and layout") {
  CHECK(quote_field("plain") == "plain");
  CHECK(quote_field("") == "");
  CHECK(quote_field("a,b") == "\"a,b\"");
  CHECK(quote_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(quote_field("two\nlines") == "\"two\nlines\"");

  CsvTable table({"x", "note"});
  table.add_row({"1", "integral excludes point masses"});
  table.add_row({"2", "a,b"});
  CHECK(table.str() == "x,note\r\n1,integral excludes point masses\r\n2,\"a,b\"\r\n");
  CHECK_THROWS_AS(table.add_row({"3"}), std::logic_error);

  std::ostringstream out;
  table.write(out);
  CHECK(out.str() == table.str());
}

TEST_CASE("command names") {
  for (const auto c : {Command::Bound, Command::Prelog, Command::Szego, Command::Mi, Command::SpectrumCheck})
    CHECK(command_from_string(to_string(c)) == c);
  CHECK_FALSE(command_from_string("capacity").has_value());
  for (const auto name : kKnownOutputs) CHECK(command_from_string(name).has_value());
}

TEST_CASE("shipped scenarios round-trip") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kScenarioDir)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    CAPTURE(entry.path().filename().string());
    const Scenario first = load_scenario(entry.path());
    const std::string text = serialize(first);
    const Scenario second = parse_scenario(text);
    CHECK(second == first);
    CHECK(serialize(second) == text);
  }
  CHECK(count >= 4);
}

TEST_CASE("scenario defaults and normalization") {
  const Scenario s = parse_scenario(white_scenario());
  CHECK(s.name == "white");
  CHECK(s.snr_grid == std::vector<double>{10, 100, 1000, 10000});
  CHECK_FALSE(s.fixed_gamma.has_value());
  CHECK(s.seed == 0);
  CHECK(s.noise_variance == 1.0);
  CHECK(s.samples == 1'000'000);
  CHECK(s.tolerances.prelog == 0.05);
  CHECK(s.tolerances.mi_sigmas == 3.0);

  const auto doc = to_json(s);
  CHECK(doc.at("gamma_mode") == "optimized");
  CHECK(doc.at("model").at("spectrum").at("preset") == "white");

  const Scenario grid = parse_scenario(R"({
  "name": "grid",
  "model": {"kind": "fir", "taps": [1, [0, 1]], "innovation": "unit-modulus", "mean": [0.5, -0.25]},
  "snr_grid": {"start": 1e4, "stop": 1e16, "points": 7},
  "gamma_mode": 1.5,
  "tolerances": {"mi_sigmas": 2}
})");
  REQUIRE(grid.snr_grid.size() == 7);
  CHECK(grid.snr_grid.front() == 1e4);
  CHECK(grid.snr_grid.back() == 1e16);
  for (std::size_t i = 0; i < 7; ++i) CHECK(grid.snr_grid[i] == doctest::Approx(std::pow(10.0, 4.0 + 2.0 * i)).epsilon(1e-13));
  CHECK(grid.fixed_gamma == 1.5);
  CHECK(grid.tolerances.mi_sigmas == 2.0);
  CHECK(grid.tolerances.prelog == 0.05);
  CHECK(grid.model.mean == std::complex<double>(0.5, -0.25));
  CHECK(parse_scenario(serialize(grid)) == grid);

  const Scenario linear = parse_scenario(R"({"name": "l", "model": {"kind": "gaussian", "spectrum": {"preset": "white"}},
    "snr_grid": {"start": 1, "stop": 2, "points": 3, "log_spaced": false}})");
  CHECK(linear.snr_grid == std::vector<double>{1.0, 1.5, 2.0});
}

TEST_CASE("validation errors point at the offending line") {
  CHECK(rejection(R"({
  "name": "x",
  "model": {"kind": "gaussian", "spectrum": {"preset": "white"}},
  "snr_grid": []
})") == std::pair<std::string, int>{"/snr_grid", 4});

  CHECK(rejection(white_scenario(",\n  \"colour\": 3")) == std::pair<std::string, int>{"/colour", 5});
  CHECK(rejection(white_scenario(",\n  \"segment_length\": 100")) == std::pair<std::string, int>{"/segment_length", 5});
  CHECK(rejection(white_scenario(",\n  \"seed\": -1")) == std::pair<std::string, int>{"/seed", 5});
  CHECK(rejection(white_scenario(",\n  \"gamma_mode\": \"best\"")) == std::pair<std::string, int>{"/gamma_mode", 5});
  CHECK(rejection(white_scenario(",\n  \"outputs\": [\"bound\",\n    \"plot\"]")) ==
        std::pair<std::string, int>{"/outputs/1", 6});
  CHECK(rejection(white_scenario(",\n  \"n_list\": [0]")) == std::pair<std::string, int>{"/n_list/0", 5});

  CHECK(rejection(R"({
  "name": "x",
  "model": {
    "kind": "gaussian",
    "spectrum": {"pieces": [{"lo": -0.5, "hi": 0.5, "density": 2}]}
  },
  "snr_grid": [1]
})") == std::pair<std::string, int>{"/model/spectrum", 5});

  CHECK(rejection(R"({
  "name": "x",
  "model": {"kind": "fir", "taps": [0]},
  "snr_grid": [1]
})")
            .first == "/model/taps");

  CHECK(rejection(R"({"name": "x", "model": {"kind": "fir", "taps": [1], "innovation": "laplace"}, "snr_grid": [1]})")
            .first == "/model/innovation");
  CHECK(rejection(R"({"name": "x", "model": {"kind": "gaussian", "spectrum": {"preset": "white"}}, "snr_grid": [2, 1]})")
            .first == "/snr_grid/1");
  CHECK(rejection(R"({"name": "x", "snr_grid": [1]})") == std::pair<std::string, int>{"", 1});

  const auto [pointer, line] = rejection("{\n  \"name\": \"x\",\n  oops\n}");
  CHECK(pointer.empty());
  CHECK(line == 3);

  try {
    parse_scenario(white_scenario(",\n  \"colour\": 3"));
    FAIL("accepted an unknown field");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
}

TEST_CASE("bound command matches the Rayleigh closed form") {
  const double gamma = 0.7;
  const Scenario s = parse_scenario(white_scenario(",\n  \"gamma_mode\": 0.7"));
  const auto result = run_command(Command::Bound, s);
  REQUIRE(result.table.rows().size() == 4);
  CHECK(result.summary.empty());
  for (std::size_t i = 0; i < 4; ++i) {
    const double snr = s.snr_grid[i];
    const double tail = std::exp(-gamma * gamma);
    const double coherent = tail * (std::log(snr) - 1.0 + 2.0 * std::log(gamma));
    const double penalty = std::log1p(snr);
    CHECK(cell(result.table, i, "tail") == doctest::Approx(tail).epsilon(1e-11));
    CHECK(cell(result.table, i, "coherent_nats") == doctest::Approx(coherent).epsilon(1e-11));
    CHECK(cell(result.table, i, "penalty_nats") == doctest::Approx(penalty).epsilon(1e-11));
    CHECK(cell(result.table, i, "bound_nats") == doctest::Approx(coherent - penalty).epsilon(1e-11));
    CHECK(cell(result.table, i, "bound_clamped_nats") == 0.0);
  }

  const auto bits = run_command(Command::Bound, s, {.bits = true});
  CHECK(bits.table.header()[3] == "coherent_bits");
  CHECK(cell(bits.table, 2, "penalty_bits") == doctest::Approx(std::log2(1001.0)).epsilon(1e-11));
}

TEST_CASE("szego command for a flat band") {
  const Scenario s = parse_scenario(R"({
  "name": "band",
  "model": {"kind": "gaussian", "spectrum": {"preset": "flat_band", "half_width": 0.25}},
  "snr_grid": [10000],
  "n_list": [128, 512, 2048]
})");
  const auto result = run_command(Command::Szego, s);
  REQUIRE(result.table.rows().size() == 3);
  const double spectral = 0.5 * std::log1p(2.0 * 1e4);
  double previous = 1e300;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(cell(result.table, i, "penalty_spectral_nats") == doctest::Approx(spectral).epsilon(1e-11));
    const double gap = cell(result.table, i, "gap_nats");
    CHECK(gap == doctest::Approx(cell(result.table, i, "penalty_logdet_nats") - spectral).epsilon(1e-9));
    CHECK(std::abs(gap) <= previous);
    previous = std::abs(gap);
    CHECK(result.table.rows()[i].back().empty());
  }
  CHECK(previous < 0.1);
}

TEST_CASE("szego flags point masses") {
  const Scenario s = parse_scenario(R"({
  "name": "mixed",
  "model": {"kind": "gaussian", "spectrum": {
    "pieces": [{"lo": -0.25, "hi": 0.25, "density": 1.5}],
    "point_masses": [{"location": 0.4, "weight": 0.25}]}},
  "snr_grid": [100],
  "n_list": [16]
})");
  const auto result = run_command(Command::Szego, s);
  CHECK(result.table.rows().at(0).back() == "integral excludes point masses");
}

TEST_CASE("prelog command") {
  const Scenario band = parse_scenario(R"({
  "name": "band",
  "model": {"kind": "gaussian", "spectrum": {"preset": "flat_band", "half_width": 0.25}},
  "snr_grid": {"start": 1e4, "stop": 1e16, "points": 7}
})");
  const auto result = run_command(Command::Prelog, band);
  CHECK(result.table.rows().size() == 7);
  REQUIRE(result.summary.size() == 1);
  CHECK(result.summary[0].find("target=0.5") != std::string::npos);
  CHECK(result.summary[0].ends_with(" PASS"));
  for (std::size_t i = 0; i < 7; ++i)
    CHECK(cell(result.table, i, "ratio") ==
          doctest::Approx(cell(result.table, i, "bound_clamped_nats") / std::log(band.snr_grid[i])).epsilon(1e-10));

  const Scenario short_grid = parse_scenario(R"({"name": "s", "model": {"kind": "gaussian", "spectrum": {"preset": "white"}},
    "snr_grid": [1e4, 1e6, 1e8]})");
  try {
    run_command(Command::Prelog, short_grid);
    FAIL("three-point grid accepted");
  } catch (const ScenarioError& e) {
    CHECK(e.pointer() == "/snr_grid");
  }
}

TEST_CASE("mi command") {
  const Scenario few = parse_scenario(white_scenario(",\n  \"samples\": 9999"));
  try {
    run_command(Command::Mi, few);
    FAIL("small sample count accepted");
  } catch (const ScenarioError& e) {
    CHECK(e.pointer() == "/samples");
  }

  const Scenario s = parse_scenario(R"({
  "name": "mi",
  "model": {"kind": "gaussian", "spectrum": {"preset": "white"}},
  "snr_grid": [10, 100],
  "samples": 20000,
  "seed": 4
})");
  const auto a = run_command(Command::Mi, s);
  CHECK(a.table.str() == run_command(Command::Mi, s).table.str());
  CHECK(a.table.str() != run_command(Command::Mi, s, {.seed = 5}).table.str());
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(cell(a.table, i, "margin_nats") ==
          doctest::Approx(cell(a.table, i, "mi_estimate_nats") - cell(a.table, i, "analytic_bound_nats")).epsilon(1e-9));
    CHECK(cell(a.table, i, "se_nats") > 0.0);
    CHECK(a.table.rows()[i].back() == "true");
  }
}

TEST_CASE("spectrum-check command") {
  const Scenario s = parse_scenario(R"({
  "name": "band",
  "model": {"kind": "gaussian", "spectrum": {"preset": "flat_band", "half_width": 0.25}},
  "snr_grid": [1],
  "path_length": 16384,
  "segment_length": 128,
  "seed": 2
})");
  const auto result = run_command(Command::SpectrumCheck, s);
  REQUIRE(result.table.rows().size() == 128);
  double inside = 0.0, total = 0.0;
  for (std::size_t i = 0; i < 128; ++i) {
    const double f = cell(result.table, i, "frequency");
    const double model = cell(result.table, i, "model_density");
    CHECK(model == (std::abs(f) < 0.25 ? 2.0 : std::abs(f) > 0.25 ? 0.0 : model));
    total += cell(result.table, i, "empirical_density");
    if (std::abs(f) <= 0.3) inside += cell(result.table, i, "empirical_density");
  }
  CHECK(inside > 0.95 * total);
}

TEST_CASE("command output does not depend on the thread count") {
  const Scenario s = parse_scenario(R"({
  "name": "threads",
  "model": {"kind": "gaussian", "spectrum": {"preset": "flat_band", "half_width": 0.2}},
  "snr_grid": {"start": 1e4, "stop": 1e10, "points": 4},
  "n_list": [32, 64],
  "samples": 20000,
  "path_length": 4096,
  "segment_length": 64
})");
  for (const auto c : {Command::Bound, Command::Prelog, Command::Szego, Command::Mi, Command::SpectrumCheck}) {
    CAPTURE(to_string(c));
    setenv("PRELOG_LAB_THREADS", "1", 1);
    const auto serial = run_command(c, s).table.str();
    setenv("PRELOG_LAB_THREADS", "3", 1);
    const auto threaded = run_command(c, s).table.str();
    CHECK(serial == threaded);
  }
  unsetenv("PRELOG_LAB_THREADS");
}

TEST_CASE("bound rows for white Rayleigh and the flat band") {
  const double root_e = std::sqrt(std::numbers::e);
  const Scenario white = parse_scenario(R"({"name": "w", "model": {"kind": "gaussian", "spectrum": {"preset": "white"}},
    "snr_grid": [100], "gamma_mode": 1.6487212707001282})");
  REQUIRE(white.fixed_gamma.has_value());
  CHECK(*white.fixed_gamma == doctest::Approx(root_e).epsilon(1e-15));
  const auto row = run_command(Command::Bound, white);
  CHECK(cell(row.table, 0, "coherent_nats") == doctest::Approx(std::exp(-std::numbers::e) * std::log(100.0)).epsilon(1e-11));
  CHECK(cell(row.table, 0, "coherent_nats") == doctest::Approx(0.30390).epsilon(1e-4));

  const Scenario band = parse_scenario(R"({"name": "b",
    "model": {"kind": "gaussian", "spectrum": {"preset": "flat_band", "half_width": 0.25}},
    "snr_grid": [1e12]})");
  CHECK(cell(run_command(Command::Bound, band).table, 0, "ratio") == doctest::Approx(0.30).epsilon(0.02));
}

TEST_CASE("szego small cases") {
  const Scenario band = parse_scenario(R"({"name": "b",
    "model": {"kind": "gaussian", "spectrum": {"preset": "flat_band", "half_width": 0.25}},
    "snr_grid": [10, 1000], "n_list": [1]})");
  const auto rows = run_command(Command::Szego, band);
  for (std::size_t i = 0; i < 2; ++i) {
    const double snr = band.snr_grid[i];
    CHECK(cell(rows.table, i, "gap_nats") == doctest::Approx(std::log1p(snr) - 0.5 * std::log1p(2.0 * snr)).epsilon(1e-11));
  }

  const Scenario white = parse_scenario(R"({"name": "w", "model": {"kind": "gaussian", "spectrum": {"preset": "white"}},
    "snr_grid": [10, 1e6], "n_list": [1, 7, 64]})");
  const auto flat = run_command(Command::Szego, white);
  for (std::size_t i = 0; i < flat.table.rows().size(); ++i) CHECK(std::abs(cell(flat.table, i, "gap_nats")) < 1e-12);
}

TEST_CASE("mi at very low snr") {
  const Scenario s = parse_scenario(R"({"name": "low", "model": {"kind": "gaussian", "spectrum": {"preset": "white"}},
    "snr_grid": [0.01], "samples": 100000, "seed": 12})");
  const auto result = run_command(Command::Mi, s);
  CHECK(std::abs(cell(result.table, 0, "mi_estimate_nats")) < 2.0 * cell(result.table, 0, "se_nats"));
  CHECK(cell(result.table, 0, "analytic_bound_nats") < 1e-12);
  CHECK(result.table.rows()[0].back() == "true");
}
