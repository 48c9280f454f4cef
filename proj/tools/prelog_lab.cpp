#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "prelog/cli/commands.hpp"
#include "prelog/cli/scenario.hpp"
#include "prelog/errors.hpp"

namespace {

constexpr int kNumericalFailure = 1;
constexpr int kValidationFailure = 2;

bool valid_thread_setting() {
  const char* env = std::getenv("PRELOG_LAB_THREADS");
  if (env == nullptr) return true;
  const std::string value(env);
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) return false;
  return value.find_first_not_of('0') != std::string::npos && value.size() <= 6;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace prelog::cli;

  CLI::App app{"Capacity lower bounds and pre-log estimates for stationary fading channels."};
  app.name("prelog-lab");
  std::string command_name, scenario_path, out_path;
  std::uint64_t seed = 0;
  bool bits = false;
  app.add_option("command", command_name, "bound | prelog | szego | mi | spectrum-check")
      ->required()
      ->check(CLI::IsMember({"bound", "prelog", "szego", "mi", "spectrum-check"}));
  app.add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  app.add_option("--out", out_path, "Write the CSV table here instead of stdout");
  auto* seed_option = app.add_option("--seed", seed, "Override the scenario seed");
  app.add_flag("--bits", bits, "Report information in bits instead of nats");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationFailure;
  }

  if (!valid_thread_setting()) {
    std::cerr << "prelog-lab: PRELOG_LAB_THREADS must be a positive integer\n";
    return kValidationFailure;
  }

  std::ifstream in(scenario_path, std::ios::binary);
  if (!in) {
    std::cerr << "prelog-lab: cannot read " << scenario_path << "\n";
    return kValidationFailure;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  try {
    const Scenario scenario = parse_scenario(text);
    RunOptions options;
    options.bits = bits;
    if (seed_option->count() > 0) options.seed = seed;
    const RunResult result = run_command(*command_from_string(command_name), scenario, options);

    if (out_path.empty()) {
      result.table.write(std::cout);
    } else {
      std::ofstream out(out_path, std::ios::binary);
      result.table.write(out);
      if (!out) {
        std::cerr << "prelog-lab: cannot write " << out_path << "\n";
        return kNumericalFailure;
      }
    }
    for (const auto& line : result.summary) std::cout << line << "\n";
    return 0;
  } catch (const ScenarioError& e) {
    std::cerr << "prelog-lab: " << scenario_path << ": " << with_source_line(e, text).what() << "\n";
    return kValidationFailure;
  } catch (const prelog::DomainError& e) {
    std::cerr << "prelog-lab: invalid input: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "prelog-lab: invalid input: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "prelog-lab: numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
