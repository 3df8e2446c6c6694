#include "isac/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "isac/core_model.hpp"
#include "isac/kernels.hpp"
#include "isac/rng.hpp"

namespace isac {

namespace {

constexpr double kGolden = 0.6180339887498949;

std::vector<cdouble> matched_coefficients(std::span<const cdouble> ytilde, const Waveform& w,
                                          const SystemConfig& cfg) {
  const size_t M = static_cast<size_t>(cfg.num_subcarriers);
  std::vector<cdouble> q(M + 1, cdouble{0.0, 0.0});
  for (size_t m = 0; m < M; ++m) {
    if (w.assignment[m] != 0.0 && w.power[m] > 0.0) {
      q[m + 1] = std::sqrt(w.power[m] * cfg.num_rx_antennas) * ytilde[m];
    }
  }
  return q;
}

double scan_objective(std::span<const cdouble> q, double spacing_hz, double tau) {
  cdouble acc{0.0, 0.0};
  for (size_t m = 1; m < q.size(); ++m) {
    if (q[m] != cdouble{0.0, 0.0}) {
      acc += q[m] * std::polar(1.0, 2.0 * M_PI * static_cast<double>(m) * spacing_hz * tau);
    }
  }
  return std::norm(acc);
}

size_t next_pow2(size_t v) {
  size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

}  // namespace

RxSnapshot simulate_rx(const ChannelResponse& channel, const Waveform& waveform,
                       std::span<const cdouble> pilots, std::span<const cdouble> data_symbols,
                       uint64_t noise_seed, const SystemConfig& cfg) {
  waveform.validate(cfg);
  const int M = cfg.num_subcarriers;
  const int Nr = cfg.num_rx_antennas;
  RxSnapshot snap;
  snap.num_subcarriers = M;
  snap.num_rx_antennas = Nr;
  snap.waveform = waveform;
  snap.pilots.assign(pilots.begin(), pilots.end());
  snap.y.resize(static_cast<size_t>(M) * Nr);

  Rng noise(derive_seed(noise_seed, 0xff01u));
  for (int m = 0; m < M; ++m) {
    const size_t mi = static_cast<size_t>(m);
    const cdouble symbol = waveform.assignment[mi] != 0.0 ? pilots[mi] : data_symbols[mi];
    const cdouble scaled = std::sqrt(waveform.power[mi]) * symbol;
    const cdouble* hrow = channel.row(m);
    cdouble* yrow = snap.y.data() + mi * Nr;
    for (int n = 0; n < Nr; ++n) {
      yrow[n] = hrow[n] * scaled + noise.complex_gaussian(cfg.noise_power_w);
    }
  }
  return snap;
}

RxSnapshot simulate_rx(const ChannelResponse& channel, const Waveform& waveform,
                       uint64_t noise_seed, const SystemConfig& cfg) {
  const size_t M = static_cast<size_t>(cfg.num_subcarriers);
  const std::vector<cdouble> pilots(M, cdouble{1.0, 0.0});
  std::vector<cdouble> data(M, cdouble{0.0, 0.0});
  Rng symbols(derive_seed(noise_seed, 0xda7au));
  for (size_t m = 0; m < M; ++m) {
    if (waveform.assignment[m] == 0.0) data[m] = symbols.complex_gaussian(1.0);
  }
  return simulate_rx(channel, waveform, pilots, data, noise_seed, cfg);
}

std::vector<AoaEstimate> estimate_aoa(const RxSnapshot& snap, const SystemConfig& cfg,
                                      int num_paths, int grid_size) {
  const int Nr = snap.num_rx_antennas;
  std::vector<cdouble> z(static_cast<size_t>(Nr));
  kernels::masked_antenna_sum(snap.num_subcarriers, Nr, snap.y.data(),
                              snap.waveform.assignment, z.data());

  const int G = grid_size;
  std::vector<double> cos_grid(static_cast<size_t>(G));
  const double step = 2.0 / G;
  for (int g = 0; g < G; ++g) cos_grid[static_cast<size_t>(g)] = -1.0 + (g + 0.5) * step;
  std::vector<double> spectrum(static_cast<size_t>(G));
  kernels::spatial_spectrum(z, cos_grid, spectrum.data());

  std::vector<int> maxima;
  for (int g = 0; g < G; ++g) {
    const double left = g > 0 ? spectrum[static_cast<size_t>(g - 1)] : -1.0;
    const double right = g + 1 < G ? spectrum[static_cast<size_t>(g + 1)] : -1.0;
    if (spectrum[static_cast<size_t>(g)] >= left && spectrum[static_cast<size_t>(g)] > right) {
      maxima.push_back(g);
    }
  }
  std::stable_sort(maxima.begin(), maxima.end(), [&](int a, int b) {
    return spectrum[static_cast<size_t>(a)] > spectrum[static_cast<size_t>(b)];
  });

  const double min_sep = 2.0 / Nr;
  std::vector<int> picked;
  for (int g : maxima) {
    if (static_cast<int>(picked.size()) == num_paths) break;
    bool ok = true;
    for (int q : picked) {
      if (std::abs(cos_grid[static_cast<size_t>(g)] - cos_grid[static_cast<size_t>(q)]) < min_sep) {
        ok = false;
        break;
      }
    }
    if (ok) picked.push_back(g);
  }
  if (static_cast<int>(picked.size()) < num_paths) {
    throw FewerPeaksThanPaths("spatial spectrum yields fewer separated peaks than paths");
  }

  int summed = 0;
  for (double u : snap.waveform.assignment) summed += u != 0.0;
  const double floor = 3.0 * std::sqrt(cfg.noise_power_w) * std::sqrt(static_cast<double>(summed));

  std::vector<AoaEstimate> out;
  out.reserve(picked.size());
  for (int g : picked) {
    double c = cos_grid[static_cast<size_t>(g)];
    if (g > 0 && g + 1 < G) {
      const double sl = spectrum[static_cast<size_t>(g - 1)];
      const double sc = spectrum[static_cast<size_t>(g)];
      const double sr = spectrum[static_cast<size_t>(g + 1)];
      const double denom = sl - 2.0 * sc + sr;
      if (denom < 0.0) {
        const double offset = std::clamp(0.5 * (sl - sr) / denom, -0.5, 0.5);
        c += offset * step;
      }
    }
    c = std::clamp(c, -1.0, 1.0);
    AoaEstimate est;
    est.cos_aoa = c;
    est.aoa_rad = std::acos(c);
    est.peak_value = spectrum[static_cast<size_t>(g)];
    est.low_confidence = est.peak_value < floor;
    out.push_back(est);
  }
  return out;
}

std::vector<cdouble> extract_path(const RxSnapshot& snap, double aoa_rad) {
  const int Nr = snap.num_rx_antennas;
  const std::vector<cdouble> a = steering_vector(aoa_rad, Nr);
  const double scale = 1.0 / std::sqrt(static_cast<double>(Nr));
  std::vector<cdouble> ytilde(static_cast<size_t>(snap.num_subcarriers), cdouble{0.0, 0.0});
  for (int m = 0; m < snap.num_subcarriers; ++m) {
    const size_t mi = static_cast<size_t>(m);
    if (snap.waveform.assignment[mi] == 0.0) continue;
    const cdouble* yrow = snap.row(m);
    cdouble acc{0.0, 0.0};
    for (int n = 0; n < Nr; ++n) acc += std::conj(a[static_cast<size_t>(n)]) * yrow[n];
    ytilde[mi] = scale * acc * std::conj(snap.pilots[mi]);
  }
  return ytilde;
}

PathEstimate estimate_delay(std::span<const cdouble> ytilde, const Waveform& waveform,
                            const SystemConfig& cfg, const DelayGrid& grid) {
  const double df = cfg.subcarrier_spacing_hz;
  const int M = cfg.num_subcarriers;
  int powered = 0;
  double sensing_power = 0;
  for (size_t m = 0; m < waveform.assignment.size(); ++m) {
    if (waveform.assignment[m] != 0.0 && waveform.power[m] > 0.0) {
      ++powered;
      sensing_power += waveform.power[m];
    }
  }
  if (powered < 2) {
    throw InfeasibleSensing("delay estimation needs at least two powered sensing subcarriers");
  }

  const double default_res = 1.0 / (8.0 * M * df);
  const double res = grid.resolution_s > 0.0 ? grid.resolution_s : default_res;
  if (res > 1.0 / (4.0 * M * df) * (1.0 + 1e-12)) {
    throw std::invalid_argument("delay grid resolution coarser than 1/(4 M df)");
  }
  const double period = 1.0 / df;
  const size_t G = next_pow2(static_cast<size_t>(std::ceil(period / res)));
  const double spacing = period / static_cast<double>(G);

  const std::vector<cdouble> q = matched_coefficients(ytilde, waveform, cfg);
  std::vector<double> profile(G);
  kernels::delay_profile(q, static_cast<int>(G), profile.data());

  size_t g_best = 0;
  for (size_t g = 1; g < G; ++g) {
    if (profile[g] > profile[g_best]) g_best = g;
  }

  // Golden-section refinement on the continuous objective within the two
  // cells around the winning grid point (interval may wrap at the period).
  double a = (static_cast<double>(g_best) - 1.0) * spacing;
  double b = (static_cast<double>(g_best) + 1.0) * spacing;
  const double tol = grid.refine_tol_s > 0.0 ? grid.refine_tol_s : 1e-4 / (M * df);
  auto wrap = [period](double tau) {
    tau = std::fmod(tau, period);
    return tau < 0.0 ? tau + period : tau;
  };
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = scan_objective(q, df, wrap(x1));
  double f2 = scan_objective(q, df, wrap(x2));
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = scan_objective(q, df, wrap(x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = scan_objective(q, df, wrap(x1));
    }
  }
  const double tau_hat = wrap(0.5 * (a + b));

  cdouble num{0.0, 0.0};
  for (size_t m = 1; m < q.size(); ++m) {
    if (q[m] != cdouble{0.0, 0.0}) {
      num += q[m] * std::polar(1.0, 2.0 * M_PI * static_cast<double>(m) * df * tau_hat);
    }
  }
  PathEstimate est;
  est.delay_s = tau_hat;
  est.coefficient = num / (cfg.num_rx_antennas * sensing_power);
  est.objective = std::norm(num);
  return est;
}

}  // namespace isac
