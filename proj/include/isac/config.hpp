// JSON run configuration: scenario, optimizer, sweep and output sections.
// Unknown keys are rejected so typos fail loudly instead of silently running
// defaults.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isac/harness.hpp"

namespace isac {

struct OutputSpec {
  std::string dir = "out";
  bool write_trace = true;
};

struct RunConfig {
  Scenario scenario;            // paths possibly empty until materialized
  bool explicit_paths = false;  // scenario.paths given literally in the file
  int num_paths = 6;            // drawn from the seed when not explicit
  OptimizerConfig optimizer;
  SweepSpec sweep;
  std::vector<double> budgets_w;   // sweep grid axes for the CLI
  std::vector<double> bounds_m;
  OutputSpec output;
  uint64_t seed = 1;
};

// Parses and validates; throws ConfigError with a one-line diagnostic.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Fills scenario.paths (and label/seed) when they were not explicit.
void materialize_scenario(RunConfig& rc);

// Canonical JSON echo of the effective configuration; hashed into the manifest.
std::string canonical_config_json(const RunConfig& rc);

}  // namespace isac
