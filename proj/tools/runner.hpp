#pragma once

// Config-driven task runner behind the command-line tool. Parses a JSON
// config, executes the selected tasks in declared order, and produces a
// canonical report: byte-identical for identical (config, seed, flags).

#include <cstdint>
#include <optional>
#include <string>

namespace excal::tool {

struct RunOptions {
  // Task filter: "check", "div", "weakdiv", "surface", "theorem2",
  // "restriction", or "" for every task in the config.
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::optional<int> points;
  std::optional<double> tol;
  std::string format = "json";  // "json" or "csv"
};

struct RunOutcome {
  // 0: all residuals within tolerance; 1: violation (worst witness in the
  // report); 2: config error (message in `report`).
  int exit_code = 2;
  std::string report;
};

RunOutcome run_config(const std::string& config_text, const RunOptions& options);

}  // namespace excal::tool
