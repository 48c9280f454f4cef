#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prelog/cli/csv.hpp"
#include "prelog/cli/scenario.hpp"

namespace prelog::cli {

enum class Command { Bound, Prelog, Szego, Mi, SpectrumCheck };

std::optional<Command> command_from_string(std::string_view name);
std::string to_string(Command command);

struct RunOptions {
  bool bits = false;                   // divide information columns by ln 2, suffix "_bits"
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
};

struct RunResult {
  CsvTable table;
  std::vector<std::string> summary;  // extra lines for stdout (prelog only)
};

/// Runs one subcommand. Scenario preconditions specific to the command are
/// reported as ScenarioError with the pointer of the offending field.
RunResult run_command(Command command, const Scenario& scenario, const RunOptions& options = {});

}  // namespace prelog::cli
