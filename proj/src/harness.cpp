#include "isac/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "isac/baselines.hpp"
#include "isac/core_model.hpp"
#include "isac/estimator.hpp"
#include "isac/rng.hpp"
#include "isac/sensing_crb.hpp"

namespace isac {

std::string method_name(Method m) {
  switch (m) {
    case Method::Jpcde: return "jpcde";
    case Method::Saupa: return "saupa";
    case Method::Rsapa: return "rsapa";
    case Method::Rsaupa: return "rsaupa";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "jpcde") return Method::Jpcde;
  if (name == "saupa") return Method::Saupa;
  if (name == "rsapa") return Method::Rsapa;
  if (name == "rsaupa") return Method::Rsaupa;
  return std::nullopt;
}

std::string sweep_param_name(SweepParam p) {
  return p == SweepParam::TotalBudgetW ? "total_budget_w" : "range_bound_m";
}

PathSet draw_paths(const SystemConfig& cfg, int count, uint64_t seed) {
  Rng rng(derive_seed(seed, 0x9a75u));
  const double min_sep = 2.1 / cfg.num_rx_antennas;
  std::vector<double> coss;
  for (int restart = 0; restart < 1000 && static_cast<int>(coss.size()) < count; ++restart) {
    coss.clear();
    bool ok = true;
    for (int p = 0; p < count && ok; ++p) {
      ok = false;
      for (int attempt = 0; attempt < 200; ++attempt) {
        const double c = rng.uniform(-0.95, 0.95);
        bool clear = true;
        for (double other : coss) {
          if (std::abs(c - other) < min_sep) {
            clear = false;
            break;
          }
        }
        if (clear) {
          coss.push_back(c);
          ok = true;
          break;
        }
      }
    }
  }
  if (static_cast<int>(coss.size()) < count) {
    throw ConfigError("could not draw enough angularly separated paths; reduce num_paths");
  }

  PathSet ps;
  const double period = 1.0 / cfg.subcarrier_spacing_hz;
  for (int p = 0; p < count; ++p) {
    Path path;
    path.delay_s = rng.uniform(0.05, 0.95) * period;
    const double mag = std::exp(rng.uniform(std::log(0.1), std::log(1.0)));
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    path.coefficient = std::polar(mag, phase);
    path.aoa_rad = std::acos(coss[static_cast<size_t>(p)]);
    ps.paths.push_back(path);
  }
  return ps;
}

Scenario default_scenario(uint64_t seed) {
  Scenario sc;
  sc.seed = seed;
  sc.label = "default";
  sc.config.num_subcarriers = 1024;
  sc.config.subcarrier_spacing_hz = 150e3;
  sc.config.num_rx_antennas = 16;
  sc.config.noise_power_w = 1e-3;
  sc.config.per_subcarrier_cap_w = 4e-2;
  sc.config.total_budget_w = 10.0;
  sc.config.speed_of_light_mps = 3e8;
  sc.config.delay_error_bound_s = 0.05 / sc.config.speed_of_light_mps;
  sc.paths = draw_paths(sc.config, 6, seed);
  return sc;
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= 0) throw ConfigError("sweep values must be positive");
    if (i > 0 && values[i] <= values[i - 1])
      throw ConfigError("sweep values must be strictly increasing");
  }
  if (trials < 0) throw ConfigError("trials must be >= 0");
  if (methods.empty()) throw ConfigError("sweep needs at least one method");
  if (sensing_fraction <= 0 || sensing_fraction > 1)
    throw ConfigError("sensing_fraction must lie in (0, 1]");
  if (aoa_grid_size < 16) throw ConfigError("aoa_grid_size must be >= 16");
  if (num_threads < 0) throw ConfigError("num_threads must be >= 0");
}

namespace {

SystemConfig config_at(const Scenario& scenario, SweepParam param, double value) {
  SystemConfig cfg = scenario.config;
  if (param == SweepParam::TotalBudgetW) {
    cfg.total_budget_w = value;
  } else {
    cfg.delay_error_bound_s = value / cfg.speed_of_light_mps;
  }
  return cfg;
}

struct Design {
  Waveform waveform;
  double cdr = 0;
  double bandwidth = 0;
  bool feasible = false;
};

Design design_waveform(Method method, const ChannelResponse& channel, const Scenario& scenario,
                       const SystemConfig& cfg, const SweepSpec& spec, uint64_t draw_seed) {
  Design d;
  switch (method) {
    case Method::Jpcde: {
      OptimizerConfig opt = spec.optimizer;
      opt.record_trace = false;
      OptimizationResult r = optimize(channel, scenario.paths, cfg, opt);
      d.waveform = std::move(r.waveform);
      d.cdr = r.cdr;
      d.bandwidth = r.effective_bandwidth;
      d.feasible = r.feasible;
      break;
    }
    case Method::Saupa: {
      OptimizerConfig opt = spec.optimizer;
      opt.record_trace = false;
      BaselineResult r = saupa(channel, scenario.paths, cfg, opt);
      d.waveform = std::move(r.waveform);
      d.cdr = r.cdr;
      d.bandwidth = r.effective_bandwidth;
      d.feasible = r.feasible;
      break;
    }
    case Method::Rsapa: {
      BaselineResult r = rsapa(channel, scenario.paths, cfg, draw_seed, spec.sensing_fraction);
      d.waveform = std::move(r.waveform);
      d.cdr = r.cdr;
      d.bandwidth = r.effective_bandwidth;
      d.feasible = r.feasible;
      break;
    }
    case Method::Rsaupa: {
      BaselineResult r = rsaupa(channel, scenario.paths, cfg, draw_seed, spec.sensing_fraction);
      d.waveform = std::move(r.waveform);
      d.cdr = r.cdr;
      d.bandwidth = r.effective_bandwidth;
      d.feasible = r.feasible;
      break;
    }
  }
  return d;
}

double circular_distance(double a, double b, double period) {
  double d = std::abs(a - b);
  d = std::fmod(d, period);
  return std::min(d, period - d);
}

// Greedy one-to-one matching of estimated to true AoAs by cos distance.
std::vector<int> associate_paths(const std::vector<AoaEstimate>& estimates,
                                 const PathSet& truth) {
  const int P = truth.count();
  std::vector<int> match(static_cast<size_t>(P), -1);
  std::vector<bool> est_used(estimates.size(), false);
  for (int round = 0; round < P; ++round) {
    double best = std::numeric_limits<double>::infinity();
    int bp = -1, be = -1;
    for (int p = 0; p < P; ++p) {
      if (match[static_cast<size_t>(p)] >= 0) continue;
      const double ct = std::cos(truth.paths[static_cast<size_t>(p)].aoa_rad);
      for (size_t e = 0; e < estimates.size(); ++e) {
        if (est_used[e]) continue;
        const double d = std::abs(estimates[e].cos_aoa - ct);
        if (d < best) {
          best = d;
          bp = p;
          be = static_cast<int>(e);
        }
      }
    }
    if (bp < 0) break;
    match[static_cast<size_t>(bp)] = be;
    est_used[static_cast<size_t>(be)] = true;
  }
  return match;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const Scenario& scenario) {
  spec.validate();
  scenario.config.validate();
#ifdef _OPENMP
  if (spec.num_threads > 0) omp_set_num_threads(spec.num_threads);
#endif
  SweepResult result;
  result.master_seed = scenario.seed;
  result.scenario_label = scenario.label;

  const ChannelResponse channel = channel_response(scenario.config, scenario.paths);
  const int P = scenario.paths.count();
  const double period = 1.0 / scenario.config.subcarrier_spacing_hz;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (size_t vi = 0; vi < spec.values.size(); ++vi) {
    const SystemConfig cfg = config_at(scenario, spec.param, spec.values[vi]);
    const uint64_t draw_seed = derive_seed(scenario.seed, 0xd3a1u, vi);
    for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
      const Method method = spec.methods[mi];
      const uint64_t point_index = vi * spec.methods.size() + mi;
      const Design d = design_waveform(method, channel, scenario, cfg, spec, draw_seed);

      PointResult pr;
      pr.method = method;
      pr.param = spec.param;
      pr.sweep_value = spec.values[vi];
      pr.feasible = d.feasible;
      pr.cdr_bps_hz = d.cdr;
      pr.effective_bandwidth = d.bandwidth;
      pr.n_sensing_mean = d.waveform.sensing_count();

      pr.crb_range_per_path_m.assign(static_cast<size_t>(P),
                                     std::numeric_limits<double>::infinity());
      pr.crb_range_m = std::numeric_limits<double>::infinity();
      if (d.bandwidth > 0) {
        pr.crb_range_m = 0;
        for (int p = 0; p < P; ++p) {
          const double crb = crb_delay(d.waveform.assignment, d.waveform.power, cfg,
                                       scenario.paths.paths[static_cast<size_t>(p)]);
          const double r = range_error(crb, cfg.speed_of_light_mps);
          pr.crb_range_per_path_m[static_cast<size_t>(p)] = r;
          pr.crb_range_m = std::max(pr.crb_range_m, r);
        }
      }

      pr.rmse_range_m = nan;
      pr.rmse_range_per_path_m.assign(static_cast<size_t>(P), nan);
      pr.feasibility_rate = d.feasible ? 1.0 : 0.0;

      int powered_sensing = 0;
      for (size_t m = 0; m < d.waveform.assignment.size(); ++m) {
        powered_sensing += d.waveform.assignment[m] != 0.0 && d.waveform.power[m] > 0.0;
      }

      if (spec.trials > 0 && d.feasible && powered_sensing >= 2) {
        const int T = spec.trials;
        pr.trials_attempted = T;
        std::vector<uint8_t> ok(static_cast<size_t>(T), 0);
        std::vector<double> sq(static_cast<size_t>(T) * static_cast<size_t>(P), 0.0);

#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < T; ++t) {
          const uint64_t trial_seed = derive_seed(scenario.seed, point_index, static_cast<uint64_t>(t));
          try {
            const RxSnapshot snap = simulate_rx(channel, d.waveform, trial_seed, cfg);
            const std::vector<AoaEstimate> aoas = estimate_aoa(snap, cfg, P, spec.aoa_grid_size);
            const std::vector<int> match = associate_paths(aoas, scenario.paths);
            for (int p = 0; p < P; ++p) {
              const int e = match[static_cast<size_t>(p)];
              const std::vector<cdouble> ytilde =
                  extract_path(snap, aoas[static_cast<size_t>(e)].aoa_rad);
              const PathEstimate est = estimate_delay(ytilde, d.waveform, cfg);
              const double dtau = circular_distance(
                  est.delay_s, scenario.paths.paths[static_cast<size_t>(p)].delay_s, period);
              const double derr = cfg.speed_of_light_mps * dtau;
              sq[static_cast<size_t>(t) * P + static_cast<size_t>(p)] = derr * derr;
            }
            ok[static_cast<size_t>(t)] = 1;
          } catch (const std::exception&) {
            ok[static_cast<size_t>(t)] = 0;
          }
        }

        // ordered reduction, independent of thread count
        int succeeded = 0;
        std::vector<double> per_path_sum(static_cast<size_t>(P), 0.0);
        double pooled = 0.0;
        for (int t = 0; t < T; ++t) {
          if (!ok[static_cast<size_t>(t)]) continue;
          ++succeeded;
          for (int p = 0; p < P; ++p) {
            const double s = sq[static_cast<size_t>(t) * P + static_cast<size_t>(p)];
            per_path_sum[static_cast<size_t>(p)] += s;
            pooled += s;
          }
        }
        pr.trials_failed = T - succeeded;
        pr.feasibility_rate = static_cast<double>(succeeded) / T;
        if (succeeded > 0) {
          pr.rmse_range_m = std::sqrt(pooled / (static_cast<double>(succeeded) * P));
          for (int p = 0; p < P; ++p) {
            pr.rmse_range_per_path_m[static_cast<size_t>(p)] =
                std::sqrt(per_path_sum[static_cast<size_t>(p)] / succeeded);
          }
        }
      }

      result.points.push_back(std::move(pr));
    }
  }
  return result;
}

std::vector<ComparisonRow> compare_methods(const SweepResult& result) {
  std::vector<double> values;
  for (const PointResult& pr : result.points) {
    if (std::find(values.begin(), values.end(), pr.sweep_value) == values.end()) {
      values.push_back(pr.sweep_value);
    }
  }

  const std::pair<Method, Method> expected[] = {
      {Method::Jpcde, Method::Saupa},
      {Method::Jpcde, Method::Rsapa},
      {Method::Jpcde, Method::Rsaupa},
      {Method::Saupa, Method::Rsaupa},
      {Method::Rsapa, Method::Rsaupa},
  };

  std::vector<ComparisonRow> rows;
  for (double v : values) {
    ComparisonRow row;
    row.sweep_value = v;
    for (const PointResult& pr : result.points) {
      if (pr.sweep_value == v && pr.feasible) {
        row.ranking.emplace_back(pr.method, pr.cdr_bps_hz);
      }
    }
    std::stable_sort(row.ranking.begin(), row.ranking.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [hi, lo] : expected) {
      const auto find = [&](Method m) -> const double* {
        for (const auto& [method, rate] : row.ranking) {
          if (method == m) return &rate;
        }
        return nullptr;
      };
      const double* a = find(hi);
      const double* b = find(lo);
      if (a && b && *a < *b * (1.0 - 1e-9)) {
        row.violations.push_back(method_name(hi) + " < " + method_name(lo) + " at " +
                                 std::to_string(v));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace isac
