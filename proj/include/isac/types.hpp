// Shared domain types for the bistatic OFDM ISAC waveform library.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace isac {

using cdouble = std::complex<double>;

// Thrown when the sensing configuration cannot support delay estimation
// (zero effective bandwidth, fewer than two powered sensing subcarriers).
struct InfeasibleSensing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptySensingSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LambdaZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FewerPeaksThanPaths : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Global system constants. Subcarrier indices run 1..M in all formulas;
// storage is 0-based with the +1 shift applied at the math boundary.
struct SystemConfig {
  int num_subcarriers = 0;           // M
  double subcarrier_spacing_hz = 0;  // delta f
  int num_rx_antennas = 0;           // N_r
  double noise_power_w = 0;          // sigma^2
  double per_subcarrier_cap_w = 0;   // P_0
  double total_budget_w = 0;         // P_req
  double delay_error_bound_s = 0;    // J_0
  double speed_of_light_mps = 3.0e8;
  // Carried for documentation only; enters no computation.
  double carrier_frequency_hz = 0;

  // Throws ConfigError on hard violations; returns human-readable warnings
  // for soft ones (e.g. a budget the per-subcarrier caps can never bind).
  std::vector<std::string> validate() const;

  double range_error_bound_m() const { return speed_of_light_mps * delay_error_bound_s; }
};

// One propagation path: complex coefficient, delay, angle of arrival.
struct Path {
  cdouble coefficient{0.0, 0.0};  // b_p
  double delay_s = 0;             // tau_p, in [0, 1/delta_f)
  double aoa_rad = 0;             // psi_p, in (0, pi)
};

struct PathSet {
  std::vector<Path> paths;

  int count() const { return static_cast<int>(paths.size()); }
  // Checks per-path invariants and the pairwise AoA separation
  // |cos psi_p - cos psi_q| >= 2/N_r required for path extraction.
  void validate(const SystemConfig& cfg) const;
};

// Optimization variables: binary assignment u (1 = sensing) and powers P.
// The assignment is stored as doubles but must hold exactly 0.0 or 1.0.
struct Waveform {
  std::vector<double> assignment;
  std::vector<double> power;

  int size() const { return static_cast<int>(assignment.size()); }
  int sensing_count() const;
  double total_power() const;
  // Throws std::invalid_argument on any violated invariant.
  void validate(const SystemConfig& cfg) const;
};

// Frequency-domain channel h (M x N_r, row-major) with cached per-subcarrier
// gains ||h_m||^2.
struct ChannelResponse {
  int num_subcarriers = 0;
  int num_rx_antennas = 0;
  std::vector<cdouble> h;      // h[m * num_rx_antennas + n]
  std::vector<double> gains;   // gains[m] = sum_n |h[m][n]|^2

  const cdouble* row(int m) const { return h.data() + static_cast<size_t>(m) * num_rx_antennas; }
};

}  // namespace isac
