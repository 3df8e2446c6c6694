// Joint subcarrier assignment and power allocation via block-coordinate
// descent on the Lagrangian, with a dual subgradient update. Fully serial:
// two runs with equal inputs produce bit-identical traces.
#pragma once

#include <span>

#include "isac/types.hpp"

namespace isac {

struct OptimizerConfig {
  int max_iterations = 2000;
  // Relative initial subgradient steps; the absolute steps are normalized by
  // the initial multiplier scales and constraint magnitudes, then decay 1/sqrt(k).
  double step_lambda = 0.5;
  double step_mu = 0.5;
  // Stop after this many consecutive iterations of relative Lagrangian change
  // below eps_lagrangian.
  double eps_lagrangian = 1e-9;
  int stall_iterations = 10;
  // Constraint tolerance used both for iterate feasibility checks and for the
  // dual-residual stop test: an iterate counts as feasible when
  // total power <= budget*(1+eps) and bandwidth >= requirement*(1-eps).
  // The default absorbs the bandwidth quantization of the one-partial sensing
  // fill, which is ~1/Q^2 when the requirement engages Q capped subcarriers.
  double eps_feasibility = 8e-3;
  // Assignment flips to sensing when the per-subcarrier gradient is >= -tie_epsilon.
  double tie_epsilon = 0.0;
  bool record_trace = true;
};

struct TraceRow {
  int iteration;
  double cdr;
  double effective_bandwidth;
  double lambda;
  double mu;
  int sensing_count;
  bool feasible;
};

struct OptimizationResult {
  Waveform waveform;
  double cdr = 0;
  double effective_bandwidth = 0;
  bool feasible = false;
  int iterations_used = 0;
  std::vector<TraceRow> trace;
};

// Water-filling step for the data subcarriers at fixed lambda:
//   P_m = clamp(1/(lambda ln 2) - sigma^2/gain_m, 0, cap).
// Throws LambdaZero when lambda == 0 and any data gain is positive.
void comm_power_update(std::span<const double> assignment, std::span<const double> gains,
                       double lambda, const SystemConfig& cfg, std::span<double> power);

// Minimum-power sensing allocation at a fixed centroid y: fill subcarriers in
// descending (m - y)^2 up to the cap until the weighted sum reaches demand,
// with one partial entry. Returns false (allocation saturated, demand unmet)
// when even all-cap power is short.
bool sensing_power_update(std::span<const double> assignment, double centroid,
                          double demand, const SystemConfig& cfg, std::span<double> power);

// Sign test on d/du_m of the Lagrangian: subcarrier m goes to sensing when
//   -log2(1 + gain_m P_m / sigma^2) + mu P_m (m - y)^2 >= -tie_epsilon.
void assignment_update(std::span<const double> power, std::span<const double> gains,
                       double mu, double centroid, const SystemConfig& cfg,
                       double tie_epsilon, std::span<double> assignment);

// Projected subgradient step max(0, v + step * violation).
double dual_update(double value, double step, double violation);

// Water level such that the unassigned-cap water-filling spend over all M
// subcarriers equals min(budget, sum of caps); returned as lambda.
double initial_lambda(std::span<const double> gains, const SystemConfig& cfg);

// Powers spending exactly min(budget, sum of caps) across the subcarriers
// selected by mask!=0 (zeros elsewhere), via bisection on the water level.
std::vector<double> waterfill_budget(std::span<const double> mask, std::span<const double> gains,
                                     double budget, const SystemConfig& cfg);

OptimizationResult optimize(const ChannelResponse& channel, const PathSet& paths,
                            const SystemConfig& cfg, const OptimizerConfig& opt = {});

}  // namespace isac
