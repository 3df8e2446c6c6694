#include "isac/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "isac/core_model.hpp"
#include "isac/sensing_crb.hpp"

namespace isac {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Total water-filling spend at water level nu over the masked subcarriers.
double spend_at_level(std::span<const double> mask, std::span<const double> gains,
                      double level, const SystemConfig& cfg) {
  double s = 0;
  for (size_t m = 0; m < gains.size(); ++m) {
    if (mask[m] != 0.0 && gains[m] > 0.0) {
      s += clamp(level - cfg.noise_power_w / gains[m], 0.0, cfg.per_subcarrier_cap_w);
    }
  }
  return s;
}

double waterfill_level(std::span<const double> mask, std::span<const double> gains,
                       double budget, const SystemConfig& cfg) {
  double hi = 0;
  int active = 0;
  for (size_t m = 0; m < gains.size(); ++m) {
    if (mask[m] != 0.0 && gains[m] > 0.0) {
      hi = std::max(hi, cfg.noise_power_w / gains[m]);
      ++active;
    }
  }
  if (active == 0 || budget <= 0.0) return 0.0;
  hi += cfg.per_subcarrier_cap_w;
  const double target = std::min(budget, active * cfg.per_subcarrier_cap_w);
  double lo = 0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (spend_at_level(mask, gains, mid, cfg) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

struct Snapshot {
  std::vector<double> assignment;
  std::vector<double> power;
  double cdr = 0;
  double bandwidth = 0;
};

}  // namespace

void comm_power_update(std::span<const double> assignment, std::span<const double> gains,
                       double lambda, const SystemConfig& cfg, std::span<double> power) {
  if (lambda == 0.0) {
    for (size_t m = 0; m < gains.size(); ++m) {
      if (assignment[m] == 0.0 && gains[m] > 0.0)
        throw LambdaZero("water level undefined: lambda is zero with a positive data gain");
    }
  }
  const double level = 1.0 / (lambda * kLn2);
  for (size_t m = 0; m < gains.size(); ++m) {
    if (assignment[m] == 0.0) {
      power[m] = gains[m] > 0.0
                     ? clamp(level - cfg.noise_power_w / gains[m], 0.0, cfg.per_subcarrier_cap_w)
                     : 0.0;
    }
  }
}

bool sensing_power_update(std::span<const double> assignment, double centroid,
                          double demand, const SystemConfig& cfg, std::span<double> power) {
  std::vector<size_t> idx;
  for (size_t m = 0; m < assignment.size(); ++m) {
    if (assignment[m] != 0.0) idx.push_back(m);
  }
  auto dist2 = [centroid](size_t m) {
    const double d = static_cast<double>(m + 1) - centroid;
    return d * d;
  };
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    const double da = dist2(a), db = dist2(b);
    if (da != db) return da > db;
    return a < b;
  });
  double remaining = demand;
  for (size_t m : idx) {
    const double d2 = dist2(m);
    if (remaining <= 0.0 || d2 <= 0.0) {
      power[m] = 0.0;
      continue;
    }
    const double cap_contribution = cfg.per_subcarrier_cap_w * d2;
    if (cap_contribution >= remaining) {
      power[m] = remaining / d2;
      remaining = 0.0;
    } else {
      power[m] = cfg.per_subcarrier_cap_w;
      remaining -= cap_contribution;
    }
  }
  return remaining <= 0.0;
}

void assignment_update(std::span<const double> power, std::span<const double> gains,
                       double mu, double centroid, const SystemConfig& cfg,
                       double tie_epsilon, std::span<double> assignment) {
  for (size_t m = 0; m < gains.size(); ++m) {
    const double d = static_cast<double>(m + 1) - centroid;
    const double grad = -std::log2(1.0 + gains[m] * power[m] / cfg.noise_power_w) +
                        mu * power[m] * d * d;
    assignment[m] = grad >= -tie_epsilon ? 1.0 : 0.0;
  }
}

double dual_update(double value, double step, double violation) {
  return std::max(0.0, value + step * violation);
}

double initial_lambda(std::span<const double> gains, const SystemConfig& cfg) {
  const std::vector<double> all(gains.size(), 1.0);
  const double level = waterfill_level(all, gains, cfg.total_budget_w, cfg);
  if (level <= 0.0) return 1.0;
  return 1.0 / (level * kLn2);
}

std::vector<double> waterfill_budget(std::span<const double> mask, std::span<const double> gains,
                                     double budget, const SystemConfig& cfg) {
  std::vector<double> power(gains.size(), 0.0);
  const double level = waterfill_level(mask, gains, budget, cfg);
  for (size_t m = 0; m < gains.size(); ++m) {
    if (mask[m] != 0.0 && gains[m] > 0.0) {
      power[m] = clamp(level - cfg.noise_power_w / gains[m], 0.0, cfg.per_subcarrier_cap_w);
    }
  }
  return power;
}

OptimizationResult optimize(const ChannelResponse& channel, const PathSet& paths,
                            const SystemConfig& cfg, const OptimizerConfig& opt) {
  cfg.validate();
  paths.validate(cfg);
  const int M = cfg.num_subcarriers;
  const std::span<const double> gains(channel.gains);
  const double sigma2 = cfg.noise_power_w;
  const double preq = cfg.total_budget_w;
  const double gamma = sensing_requirement(cfg, paths).binding;

  OptimizationResult res;
  res.waveform.assignment.assign(static_cast<size_t>(M), 0.0);
  res.waveform.power.assign(static_cast<size_t>(M), 0.0);

  // Edge-heavy initial assignment: ceil(0.1 M) subcarriers split evenly across
  // the two band edges, rounding up per edge so the set stays symmetric and the
  // starting centroid sits mid-band.
  std::vector<double> u(static_cast<size_t>(M), 0.0);
  const int edge_count = (M + 9) / 10;
  const int per_edge = std::min((edge_count + 1) / 2, M);
  for (int i = 0; i < per_edge; ++i) u[static_cast<size_t>(i)] = 1.0;
  for (int i = 0; i < per_edge; ++i) u[static_cast<size_t>(M - 1 - i)] = 1.0;

  double lambda = initial_lambda(gains, cfg);
  double mu = 0.0;
  double y = 0.0;
  {
    double s = 0;
    int k = 0;
    for (int m = 0; m < M; ++m) {
      if (u[static_cast<size_t>(m)] != 0.0) {
        s += m + 1;
        ++k;
      }
    }
    y = s / k;
  }

  // Step normalization: a full-scale constraint violation moves each
  // multiplier by step_* times its natural scale on the first iteration.
  const double pbar = std::min(cfg.per_subcarrier_cap_w, preq / M);
  double max_rate = 0;
  for (int m = 0; m < M; ++m) {
    max_rate = std::max(max_rate, std::log2(1.0 + gains[static_cast<size_t>(m)] * pbar / sigma2));
  }
  const double half_span = (M - 1) / 2.0;
  const double mu_scale =
      max_rate / std::max(pbar * half_span * half_span, std::numeric_limits<double>::min());
  const double eta_lambda = opt.step_lambda * lambda / preq;
  const double eta_mu = gamma > 0 ? opt.step_mu * mu_scale / gamma : 0.0;

  std::vector<double> p(static_cast<size_t>(M), 0.0);
  std::vector<double> u_next(static_cast<size_t>(M), 0.0);

  Snapshot best, least;
  bool have_best = false;
  double least_violation = std::numeric_limits<double>::infinity();
  double prev_lagrangian = std::numeric_limits<double>::quiet_NaN();
  int stall = 0;
  int iterations = 0;

  for (int k = 1; k <= opt.max_iterations; ++k) {
    iterations = k;
    comm_power_update(u, gains, lambda, cfg, p);
    int sensing = 0;
    for (int m = 0; m < M; ++m) sensing += u[static_cast<size_t>(m)] != 0.0;
    if (sensing > 0) sensing_power_update(u, y, gamma, cfg, p);
    double sensing_power = 0;
    for (int m = 0; m < M; ++m) {
      if (u[static_cast<size_t>(m)] != 0.0) sensing_power += p[static_cast<size_t>(m)];
    }
    if (sensing_power > 0) y = sensing_centroid(u, p);

    const double bandwidth = effective_bandwidth(u, p);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    const double rate = cdr(u, p, gains, sigma2);
    double around_y = 0;
    for (int m = 0; m < M; ++m) {
      if (u[static_cast<size_t>(m)] != 0.0) {
        const double d = (m + 1) - y;
        around_y += p[static_cast<size_t>(m)] * d * d;
      }
    }
    const bool feasible = total <= preq * (1.0 + opt.eps_feasibility) &&
                          bandwidth >= gamma * (1.0 - opt.eps_feasibility);
    if (opt.record_trace) {
      res.trace.push_back(TraceRow{k, rate, bandwidth, lambda, mu, sensing, feasible});
    }
    if (feasible && (!have_best || rate > best.cdr)) {
      best = Snapshot{u, p, rate, bandwidth};
      have_best = true;
    }
    if (!have_best) {
      const double violation = std::max(0.0, total / preq - 1.0) +
                               (gamma > 0 ? std::max(0.0, 1.0 - bandwidth / gamma) : 0.0);
      if (violation < least_violation) {
        least_violation = violation;
        least = Snapshot{u, p, rate, bandwidth};
      }
    }

    const double lagrangian = rate - lambda * (total - preq) + mu * (around_y - gamma);

    assignment_update(p, gains, mu, y, cfg, opt.tie_epsilon, u_next);

    const double decay = 1.0 / std::sqrt(static_cast<double>(k));
    const double lambda_new = dual_update(lambda, eta_lambda * decay, total - preq);
    const double mu_new = dual_update(mu, eta_mu * decay, gamma - around_y);
    const double dual_residual =
        std::abs(lambda_new - lambda) / std::max(lambda, 1e-300) +
        (gamma > 0 ? std::abs(mu_new - mu) / std::max(mu_scale, 1e-300) : 0.0);
    lambda = std::max(lambda_new, 1e-300);
    mu = mu_new;
    u = u_next;

    if (std::isfinite(prev_lagrangian) &&
        std::abs(lagrangian - prev_lagrangian) <=
            opt.eps_lagrangian * std::max(1.0, std::abs(prev_lagrangian))) {
      ++stall;
    } else {
      stall = 0;
    }
    prev_lagrangian = lagrangian;

    if ((feasible && dual_residual <= opt.eps_feasibility) || stall >= opt.stall_iterations) {
      break;
    }
  }

  res.iterations_used = iterations;
  const Snapshot& pick = have_best ? best : least;
  res.waveform.assignment = pick.assignment;
  res.waveform.power = pick.power;
  res.cdr = pick.cdr;
  res.effective_bandwidth = pick.bandwidth;
  res.feasible = have_best;
  return res;
}

}  // namespace isac
