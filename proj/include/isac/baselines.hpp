// Reference allocation schemes the joint optimizer is compared against.
#pragma once

#include <cstdint>

#include "isac/types.hpp"
#include "isac/optimizer.hpp"

namespace isac {

struct BaselineResult {
  Waveform waveform;
  double cdr = 0;
  double effective_bandwidth = 0;
  bool feasible = false;
};

// Uniform power min(P0, Preq/M) on every subcarrier; assignment optimized by
// the same gradient/dual loop as the joint scheme with powers frozen.
BaselineResult saupa(const ChannelResponse& channel, const PathSet& paths,
                     const SystemConfig& cfg, const OptimizerConfig& opt = {});

// Random sensing assignment (ceil(fraction*M) subcarriers drawn without
// replacement), power optimized for it: minimum-power sensing allocation,
// then water-filling of the remaining budget over the data subcarriers.
BaselineResult rsapa(const ChannelResponse& channel, const PathSet& paths,
                     const SystemConfig& cfg, uint64_t seed, double sensing_fraction = 0.5);

// Same random assignment draw as rsapa (same seed => same subcarriers),
// uniform power min(P0, Preq/M) everywhere.
BaselineResult rsaupa(const ChannelResponse& channel, const PathSet& paths,
                      const SystemConfig& cfg, uint64_t seed, double sensing_fraction = 0.5);

// Shared helpers, also used by tests and the small-M exhaustive oracle.
std::vector<double> random_assignment(int num_subcarriers, double fraction, uint64_t seed);

// Minimum-power sensing for a fixed assignment (centroid fixed point), then
// water-filled data power from the leftover budget. feasible=false when the
// sensing demand cannot be met under the caps or exceeds the total budget.
struct FixedAssignmentPower {
  std::vector<double> power;
  double sensing_power = 0;
  bool feasible = false;
};
FixedAssignmentPower allocate_power_for_assignment(std::span<const double> assignment,
                                                   std::span<const double> gains,
                                                   double demand, const SystemConfig& cfg);

}  // namespace isac
