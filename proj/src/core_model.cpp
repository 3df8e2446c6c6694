#include "isac/core_model.hpp"

#include <cmath>

#include "isac/kernels.hpp"

namespace isac {

std::vector<cdouble> steering_vector(double aoa_rad, int num_antennas) {
  std::vector<cdouble> a(static_cast<size_t>(num_antennas));
  const double c = std::cos(aoa_rad);
  for (int n = 0; n < num_antennas; ++n) {
    a[static_cast<size_t>(n)] = std::polar(1.0, -M_PI * n * c);
  }
  return a;
}

ChannelResponse channel_response(const SystemConfig& cfg, const PathSet& paths) {
  cfg.validate();
  paths.validate(cfg);
  ChannelResponse ch;
  ch.num_subcarriers = cfg.num_subcarriers;
  ch.num_rx_antennas = cfg.num_rx_antennas;
  ch.h.resize(static_cast<size_t>(cfg.num_subcarriers) * cfg.num_rx_antennas);
  ch.gains.resize(static_cast<size_t>(cfg.num_subcarriers));
  kernels::synth_channel(cfg.num_subcarriers, cfg.num_rx_antennas, cfg.subcarrier_spacing_hz,
                         paths.paths, ch.h.data(), ch.gains.data());
  return ch;
}

double cdr(std::span<const double> assignment, std::span<const double> power,
           std::span<const double> gains, double noise_power_w) {
  double rate = 0;
  for (size_t m = 0; m < assignment.size(); ++m) {
    if (assignment[m] == 0.0) {
      rate += std::log2(1.0 + gains[m] * power[m] / noise_power_w);
    }
  }
  return rate;
}

}  // namespace isac
