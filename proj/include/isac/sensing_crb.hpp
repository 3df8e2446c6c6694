// Delay-estimation Fisher information and Cramer-Rao bounds.
#pragma once

#include <array>
#include <span>

#include "isac/types.hpp"

namespace isac {

// Squared effective bandwidth of the sensing pilots (subcarrier indices are
// 1-based in the sums):
//   W = sum_m P_m u_m m^2 - (sum_m P_m u_m m)^2 / (sum_m P_m u_m)
// Zero when the sensing set carries no power.
double effective_bandwidth(std::span<const double> assignment, std::span<const double> power);

// Weighted centroid of the sensing subcarriers, sum(P u m)/sum(P u).
// Throws EmptySensingSet when the sensing set carries no power.
double sensing_centroid(std::span<const double> assignment, std::span<const double> power);

// Per-path 3x3 Fisher information for (tau, Re b, Im b), row-major.
using Fim3 = std::array<double, 9>;
Fim3 fisher_information(std::span<const double> assignment, std::span<const double> power,
                        const SystemConfig& cfg, const Path& path);

// Delay CRB for one path, the (tau, tau) entry of the inverse FIM:
//   sigma^2 / (8 Nr |b|^2 pi^2 df^2 W)
// Throws InfeasibleSensing when W <= 0.
double crb_delay(std::span<const double> assignment, std::span<const double> power,
                 const SystemConfig& cfg, const Path& path);

double range_error(double crb_delay_s2, double speed_of_light_mps);

// Effective-bandwidth floor each path needs to meet the delay error bound,
//   J_req = sigma^2 / (8 Nr |b|^2 pi^2 df^2 J_0^2),
// and the binding (largest) requirement across paths.
struct SensingRequirement {
  std::vector<double> per_path;
  double binding = 0;
};
SensingRequirement sensing_requirement(const SystemConfig& cfg, const PathSet& paths);

}  // namespace isac
