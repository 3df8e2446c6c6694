// Receiver chain: synthetic snapshot generation, AoA matched filter, per-path
// pilot extraction, and concentrated maximum-likelihood delay estimation.
#pragma once

#include <cstdint>
#include <span>

#include "isac/types.hpp"

namespace isac {

// One OFDM symbol at the sensing receiver, all M subcarriers by Nr antennas:
//   y[m] = h[m] * s[m] * sqrt(P[m]) + w[m],  w ~ CN(0, sigma^2 I).
// Sensing subcarriers carry the known pilots, data subcarriers the supplied
// unit-power symbols.
struct RxSnapshot {
  int num_subcarriers = 0;
  int num_rx_antennas = 0;
  std::vector<cdouble> y;       // M x Nr, row-major
  std::vector<cdouble> pilots;  // length M; meaningful where assignment == 1
  Waveform waveform;

  const cdouble* row(int m) const { return y.data() + static_cast<size_t>(m) * num_rx_antennas; }
};

RxSnapshot simulate_rx(const ChannelResponse& channel, const Waveform& waveform,
                       std::span<const cdouble> pilots, std::span<const cdouble> data_symbols,
                       uint64_t noise_seed, const SystemConfig& cfg);

// Convenience: unit pilots, data symbols drawn CN(0,1) from the same seed stream.
RxSnapshot simulate_rx(const ChannelResponse& channel, const Waveform& waveform,
                       uint64_t noise_seed, const SystemConfig& cfg);

struct AoaEstimate {
  double aoa_rad = 0;
  double cos_aoa = 0;
  double peak_value = 0;
  bool low_confidence = false;  // peak below 3 sigma sqrt(M_r)
};

// Matched-filter spectrum A(psi) = |a(psi)^H sum_{sensing m} y_m| / sqrt(Nr)
// on a uniform midpoint grid in cos psi, followed by peak picking with a
// 2/Nr separation floor in cos and quadratic interpolation around each peak.
// Throws FewerPeaksThanPaths when fewer than num_paths separated peaks exist.
std::vector<AoaEstimate> estimate_aoa(const RxSnapshot& snap, const SystemConfig& cfg,
                                      int num_paths, int grid_size = 4096);

// Beamformed, pilot-stripped scalar sequence for one extracted path:
//   ytilde[m] = (1/sqrt(Nr)) a(psi_hat)^H y[m] conj(pilot[m]) on sensing
// subcarriers, zero elsewhere.
std::vector<cdouble> extract_path(const RxSnapshot& snap, double aoa_rad);

struct DelayGrid {
  double resolution_s = 0;  // 0 -> 1/(8 M df); must be <= 1/(4 M df)
  double refine_tol_s = 0;  // 0 -> 1e-4/(M df)
};

struct PathEstimate {
  double delay_s = 0;        // in [0, 1/df)
  cdouble coefficient{0, 0};
  double objective = 0;      // matched-filter power at the delay estimate
};

// Concentrated ML delay estimate from an extracted sequence: coarse scan of
//   |sum_m u_m sqrt(P_m Nr) e^{+j 2 pi m df tau} ytilde[m]|^2
// on a uniform grid over [0, 1/df), then golden-section refinement; the
// coefficient estimate is the closed-form amplitude at tau_hat.
// Throws InfeasibleSensing when fewer than two sensing subcarriers have power.
PathEstimate estimate_delay(std::span<const cdouble> ytilde, const Waveform& waveform,
                            const SystemConfig& cfg, const DelayGrid& grid = {});

}  // namespace isac
