#include "isac/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "isac/core_model.hpp"
#include "isac/rng.hpp"
#include "isac/sensing_crb.hpp"

namespace isac {

namespace {

double uniform_power(const SystemConfig& cfg) {
  return std::min(cfg.per_subcarrier_cap_w, cfg.total_budget_w / cfg.num_subcarriers);
}

double mean_index_1based(std::span<const double> assignment) {
  double s = 0;
  int k = 0;
  for (size_t m = 0; m < assignment.size(); ++m) {
    if (assignment[m] != 0.0) {
      s += static_cast<double>(m + 1);
      ++k;
    }
  }
  return k > 0 ? s / k : 0.0;
}

// Minimum-power sensing fill whose bandwidth, measured around the fill's own
// centroid, reaches demand. Subcarriers are capped in descending (m - y)^2
// order with at most one partial entry; within a cap prefix the partial power
// solving bandwidth == demand is the root of a linear equation, so each prefix
// is checked in O(1) via prefix sums. Returns false when even all-cap power
// falls short (powers then sit at the cap, mirroring the saturated fill).
bool min_power_true_bandwidth_fill(std::span<const double> assignment, double y,
                                   double demand, const SystemConfig& cfg,
                                   std::span<double> power) {
  std::vector<size_t> idx;
  for (size_t m = 0; m < assignment.size(); ++m) {
    if (assignment[m] != 0.0) {
      power[m] = 0.0;
      idx.push_back(m);
    }
  }
  if (demand <= 0.0) return true;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    const double da = (static_cast<double>(a + 1) - y) * (static_cast<double>(a + 1) - y);
    const double db = (static_cast<double>(b + 1) - y) * (static_cast<double>(b + 1) - y);
    if (da != db) return da > db;
    return a < b;
  });
  const double cap = cfg.per_subcarrier_cap_w;
  double s0 = 0, s1 = 0, s2 = 0;
  for (size_t j = 1; j <= idx.size(); ++j) {
    const double mj = static_cast<double>(idx[j - 1] + 1);
    s0 += cap;
    s1 += cap * mj;
    s2 += cap * mj * mj;
    const double w_caps = s2 - s1 * s1 / s0;
    if (w_caps >= demand) {
      for (size_t q = 0; q < j; ++q) power[idx[q]] = cap;
      return true;
    }
    if (j == idx.size()) break;
    const double mb = static_cast<double>(idx[j] + 1);
    const double off = mb - s1 / s0;
    const double denom = s0 * off * off - (demand - w_caps);
    if (denom <= 0.0) continue;
    const double partial = s0 * (demand - w_caps) / denom;
    if (partial <= cap * (1.0 + 1e-12)) {
      for (size_t q = 0; q < j; ++q) power[idx[q]] = cap;
      power[idx[j]] = std::min(partial, cap);
      return true;
    }
  }
  for (size_t m : idx) power[m] = cap;
  return false;
}

}  // namespace

std::vector<double> random_assignment(int num_subcarriers, double fraction, uint64_t seed) {
  const int M = num_subcarriers;
  int k = static_cast<int>(std::ceil(fraction * M));
  k = std::clamp(k, 0, M);
  std::vector<int> idx(static_cast<size_t>(M));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(derive_seed(seed, 0xa551u));
  std::vector<double> u(static_cast<size_t>(M), 0.0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.raw() % static_cast<uint64_t>(M - i));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    u[static_cast<size_t>(idx[static_cast<size_t>(i)])] = 1.0;
  }
  return u;
}

FixedAssignmentPower allocate_power_for_assignment(std::span<const double> assignment,
                                                   std::span<const double> gains,
                                                   double demand, const SystemConfig& cfg) {
  const size_t M = assignment.size();
  FixedAssignmentPower out;
  out.power.assign(M, 0.0);
  std::span<double> power(out.power);

  int sensing = 0;
  for (size_t m = 0; m < M; ++m) sensing += assignment[m] != 0.0;

  bool demand_met = demand <= 0.0;
  if (sensing > 0 && demand > 0.0) {
    // Every fill already meets the demand around its own centroid, so the
    // centroid recursion only searches cap orderings for a cheaper one; keep
    // the least total power over the visited orderings.
    std::vector<double> trial(M, 0.0);
    double best_total = std::numeric_limits<double>::infinity();
    double y = mean_index_1based(assignment);
    for (int it = 0; it < 64; ++it) {
      const bool met = min_power_true_bandwidth_fill(assignment, y, demand, cfg, trial);
      double s = 0;
      for (size_t m = 0; m < M; ++m) {
        if (assignment[m] != 0.0) s += trial[m];
      }
      if (met && s < best_total) {
        best_total = s;
        demand_met = true;
        for (size_t m = 0; m < M; ++m) {
          if (assignment[m] != 0.0) power[m] = trial[m];
        }
      }
      if (!met || s <= 0.0) break;
      const double y_next = sensing_centroid(assignment, trial);
      if (std::abs(y_next - y) <= 1e-12 * std::max(1.0, std::abs(y))) break;
      y = y_next;
    }
    if (!demand_met) {
      for (size_t m = 0; m < M; ++m) {
        if (assignment[m] != 0.0) power[m] = trial[m];
      }
    }
  }

  for (size_t m = 0; m < M; ++m) {
    if (assignment[m] != 0.0) out.sensing_power += power[m];
  }
  const double leftover = cfg.total_budget_w - out.sensing_power;
  out.feasible = demand_met && leftover >= -1e-9 * std::max(1.0, cfg.total_budget_w);

  std::vector<double> comm_mask(M, 0.0);
  for (size_t m = 0; m < M; ++m) comm_mask[m] = assignment[m] == 0.0 ? 1.0 : 0.0;
  const std::vector<double> comm_power =
      waterfill_budget(comm_mask, gains, std::max(leftover, 0.0), cfg);
  for (size_t m = 0; m < M; ++m) {
    if (assignment[m] == 0.0) out.power[m] = comm_power[m];
  }
  return out;
}

BaselineResult saupa(const ChannelResponse& channel, const PathSet& paths,
                     const SystemConfig& cfg, const OptimizerConfig& opt) {
  cfg.validate();
  paths.validate(cfg);
  const int M = cfg.num_subcarriers;
  const std::span<const double> gains(channel.gains);
  const double gamma = sensing_requirement(cfg, paths).binding;
  const double pbar = uniform_power(cfg);
  const std::vector<double> power(static_cast<size_t>(M), pbar);

  std::vector<double> u(static_cast<size_t>(M), 0.0);
  const int edge_count = (M + 9) / 10;
  const int per_edge = std::min((edge_count + 1) / 2, M);
  for (int i = 0; i < per_edge; ++i) {
    u[static_cast<size_t>(i)] = 1.0;
    u[static_cast<size_t>(M - 1 - i)] = 1.0;
  }

  double max_rate = 0;
  for (int m = 0; m < M; ++m) {
    max_rate = std::max(max_rate, std::log2(1.0 + gains[static_cast<size_t>(m)] * pbar /
                                                      cfg.noise_power_w));
  }
  const double half_span = (M - 1) / 2.0;
  const double mu_scale =
      max_rate / std::max(pbar * half_span * half_span, std::numeric_limits<double>::min());
  const double eta_mu = gamma > 0 ? opt.step_mu * mu_scale / gamma : 0.0;

  double mu = 0.0;
  double y = mean_index_1based(u);
  std::vector<double> u_next(static_cast<size_t>(M), 0.0);

  BaselineResult best;
  bool have_best = false;
  std::vector<double> least_u = u;
  double least_violation = std::numeric_limits<double>::infinity();
  double prev_lagrangian = std::numeric_limits<double>::quiet_NaN();
  int stall = 0;

  for (int k = 1; k <= opt.max_iterations; ++k) {
    if (std::any_of(u.begin(), u.end(), [](double v) { return v != 0.0; })) {
      y = mean_index_1based(u);
    }
    const double bandwidth = effective_bandwidth(u, power);
    const double rate = cdr(u, power, gains, cfg.noise_power_w);
    const bool feasible = bandwidth >= gamma * (1.0 - opt.eps_feasibility);
    if (feasible && (!have_best || rate > best.cdr)) {
      best.waveform.assignment = u;
      best.cdr = rate;
      best.effective_bandwidth = bandwidth;
      have_best = true;
    }
    if (!have_best) {
      const double violation = gamma > 0 ? std::max(0.0, 1.0 - bandwidth / gamma) : 0.0;
      if (violation < least_violation) {
        least_violation = violation;
        least_u = u;
      }
    }

    double around_y = 0;
    for (int m = 0; m < M; ++m) {
      if (u[static_cast<size_t>(m)] != 0.0) {
        const double d = (m + 1) - y;
        around_y += pbar * d * d;
      }
    }
    const double lagrangian = rate + mu * (around_y - gamma);

    assignment_update(power, gains, mu, y, cfg, opt.tie_epsilon, u_next);
    mu = dual_update(mu, eta_mu / std::sqrt(static_cast<double>(k)), gamma - around_y);
    u = u_next;

    if (std::isfinite(prev_lagrangian) &&
        std::abs(lagrangian - prev_lagrangian) <=
            opt.eps_lagrangian * std::max(1.0, std::abs(prev_lagrangian))) {
      if (++stall >= opt.stall_iterations) break;
    } else {
      stall = 0;
    }
    prev_lagrangian = lagrangian;
  }

  if (!have_best) {
    best.waveform.assignment = least_u;
    best.cdr = cdr(least_u, power, gains, cfg.noise_power_w);
    best.effective_bandwidth = effective_bandwidth(least_u, power);
  }
  best.waveform.power = power;
  best.feasible = have_best;
  return best;
}

BaselineResult rsapa(const ChannelResponse& channel, const PathSet& paths,
                     const SystemConfig& cfg, uint64_t seed, double sensing_fraction) {
  cfg.validate();
  paths.validate(cfg);
  const double gamma = sensing_requirement(cfg, paths).binding;
  BaselineResult out;
  out.waveform.assignment = random_assignment(cfg.num_subcarriers, sensing_fraction, seed);
  FixedAssignmentPower alloc =
      allocate_power_for_assignment(out.waveform.assignment, channel.gains, gamma, cfg);
  out.waveform.power = std::move(alloc.power);
  out.cdr = cdr(out.waveform, channel, cfg);
  out.effective_bandwidth = effective_bandwidth(out.waveform.assignment, out.waveform.power);
  out.feasible = alloc.feasible;
  return out;
}

BaselineResult rsaupa(const ChannelResponse& channel, const PathSet& paths,
                      const SystemConfig& cfg, uint64_t seed, double sensing_fraction) {
  cfg.validate();
  paths.validate(cfg);
  const double gamma = sensing_requirement(cfg, paths).binding;
  BaselineResult out;
  out.waveform.assignment = random_assignment(cfg.num_subcarriers, sensing_fraction, seed);
  out.waveform.power.assign(out.waveform.assignment.size(), uniform_power(cfg));
  out.cdr = cdr(out.waveform, channel, cfg);
  out.effective_bandwidth = effective_bandwidth(out.waveform.assignment, out.waveform.power);
  out.feasible = out.effective_bandwidth >= gamma * (1.0 - 1e-12);
  return out;
}

}  // namespace isac
