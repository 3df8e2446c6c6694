// Signal model: steering vectors, channel synthesis, communication data rate.
#pragma once

#include <span>

#include "isac/types.hpp"

namespace isac {

// Uniform linear array response at half-wavelength spacing:
//   a[n] = exp(-j pi n cos psi), n = 0..Nr-1.
std::vector<cdouble> steering_vector(double aoa_rad, int num_antennas);

// Superposition of path responses across all subcarriers (OpenMP kernel
// underneath); validates the path set against cfg first.
ChannelResponse channel_response(const SystemConfig& cfg, const PathSet& paths);

// Communication data rate in bit/s/Hz:
//   sum over data subcarriers of log2(1 + gains[m] P[m] / sigma^2).
double cdr(std::span<const double> assignment, std::span<const double> power,
           std::span<const double> gains, double noise_power_w);

inline double cdr(const Waveform& w, const ChannelResponse& ch, const SystemConfig& cfg) {
  return cdr(w.assignment, w.power, ch.gains, cfg.noise_power_w);
}

}  // namespace isac
