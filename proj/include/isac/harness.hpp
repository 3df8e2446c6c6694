// Experiment harness: scenario construction, method sweeps with Monte Carlo
// receiver trials, and cross-method comparison.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "isac/types.hpp"
#include "isac/optimizer.hpp"

namespace isac {

enum class Method { Jpcde, Saupa, Rsapa, Rsaupa };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct Scenario {
  SystemConfig config;
  PathSet paths;
  std::string label;
  uint64_t seed = 0;
};

// Reference setup: M=1024, df=150 kHz, Nr=16, sigma^2=1e-3 W, P0=0.04 W,
// Preq=10 W, 5 cm range bound, six random paths with separated AoAs drawn
// deterministically from the seed.
Scenario default_scenario(uint64_t seed);

// Random paths: delays uniform in the middle 90% of [0, 1/df), |b| log-uniform
// in [0.1, 1], phases uniform, AoAs redrawn until pairwise cos separation
// clears 2/Nr with margin.
PathSet draw_paths(const SystemConfig& cfg, int count, uint64_t seed);

enum class SweepParam { TotalBudgetW, RangeBoundM };

std::string sweep_param_name(SweepParam p);

struct SweepSpec {
  SweepParam param = SweepParam::TotalBudgetW;
  std::vector<double> values;      // strictly increasing
  int trials = 300;                // 0 = skip receiver trials
  std::vector<Method> methods{Method::Jpcde, Method::Saupa, Method::Rsapa, Method::Rsaupa};
  double sensing_fraction = 0.5;   // random-assignment baselines
  OptimizerConfig optimizer;
  int aoa_grid_size = 4096;
  int num_threads = 0;             // 0 = library default
  void validate() const;           // throws ConfigError
};

struct PointResult {
  Method method = Method::Jpcde;
  SweepParam param = SweepParam::TotalBudgetW;
  double sweep_value = 0;
  bool feasible = false;
  double cdr_bps_hz = 0;
  double effective_bandwidth = 0;
  double crb_range_m = 0;              // worst path
  std::vector<double> crb_range_per_path_m;
  double rmse_range_m = 0;             // pooled over paths; NaN without trials
  std::vector<double> rmse_range_per_path_m;
  double feasibility_rate = 0;         // fraction of trials with all paths resolved
  double n_sensing_mean = 0;
  int trials_attempted = 0;
  int trials_failed = 0;
};

struct SweepResult {
  std::vector<PointResult> points;  // methods x values, value-major order
  uint64_t master_seed = 0;
  std::string scenario_label;
};

// Runs every (value, method) cell: applies the swept parameter to the config,
// designs the waveform, and when trials > 0 and the design is feasible runs
// that many receiver trials. Per-trial seeds derive from (master seed, point
// index, trial index); trial loops are OpenMP-parallel over preallocated
// slots, so results do not depend on thread count.
SweepResult run_sweep(const SweepSpec& spec, const Scenario& scenario);

struct ComparisonRow {
  double sweep_value = 0;
  std::vector<std::pair<Method, double>> ranking;  // feasible methods, CDR desc
  std::vector<std::string> violations;             // expected-order breaches
};

// Expected dominance where both sides are feasible: Jpcde >= Saupa,
// Jpcde >= Rsapa, Saupa >= Rsaupa, Rsapa >= Rsaupa.
std::vector<ComparisonRow> compare_methods(const SweepResult& result);

}  // namespace isac
