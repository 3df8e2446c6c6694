// Batch front end: optimize | sweep | estimate | compare.
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "isac/baselines.hpp"
#include "isac/config.hpp"
#include "isac/core_model.hpp"
#include "isac/estimator.hpp"
#include "isac/harness.hpp"
#include "isac/io.hpp"
#include "isac/optimizer.hpp"
#include "isac/rng.hpp"
#include "isac/sensing_crb.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  int trials = -1;
  int threads = 0;
  bool quiet = false;
};

int resolve_threads(const CommonArgs& args) {
  if (args.threads > 0) return args.threads;
  if (const char* env = std::getenv("ISAC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;
}

void apply_overrides(isac::RunConfig& rc, const CommonArgs& args) {
  if (args.seed_set) rc.seed = args.seed;
  if (!args.out_dir.empty()) rc.output.dir = args.out_dir;
  if (args.trials >= 0) rc.sweep.trials = args.trials;
  const int threads = resolve_threads(args);
  rc.sweep.num_threads = threads;
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif
}

isac::RunConfig load_config(const CommonArgs& args) {
  isac::RunConfig rc = args.config_path.empty()
                           ? isac::parse_run_config("{}")
                           : isac::load_run_config(args.config_path);
  apply_overrides(rc, args);
  isac::materialize_scenario(rc);
  for (const std::string& w : rc.scenario.config.validate()) {
    if (!args.quiet) std::cerr << "warning: " << w << "\n";
  }
  return rc;
}

void write_manifest(const isac::RunConfig& rc, const CommonArgs& args, const char* command,
                    const std::vector<std::string>& outputs) {
  const std::string canonical = isac::canonical_config_json(rc);
  json m;
  m["command"] = command;
  m["config_path"] = args.config_path.empty() ? "(defaults)" : args.config_path;
  m["config_sha1"] = isac::git_blob_sha1(canonical);
  m["config"] = json::parse(canonical);
  m["seed"] = rc.seed;
  m["threads"] = resolve_threads(args);
  m["trials"] = rc.sweep.trials;
  m["outputs"] = outputs;
  isac::write_text_file((fs::path(rc.output.dir) / "run_manifest.json").string(),
                        m.dump(2) + "\n");
}

json summary_json(const isac::RunConfig& rc, const isac::OptimizationResult& res) {
  const isac::SystemConfig& cfg = rc.scenario.config;
  json s;
  s["feasible"] = res.feasible;
  s["cdr_bps_hz"] = res.cdr;
  s["effective_bandwidth"] = res.effective_bandwidth;
  s["iterations"] = res.iterations_used;
  s["total_power_w"] = res.waveform.total_power();
  s["n_sensing"] = res.waveform.sensing_count();
  s["budget_w"] = cfg.total_budget_w;
  s["range_bound_m"] = cfg.range_error_bound_m();
  json crb_delay_list = json::array();
  json crb_range_list = json::array();
  double worst = std::numeric_limits<double>::infinity();
  if (res.effective_bandwidth > 0) {
    worst = 0;
    for (const isac::Path& p : rc.scenario.paths.paths) {
      const double crb =
          isac::crb_delay(res.waveform.assignment, res.waveform.power, cfg, p);
      const double r = isac::range_error(crb, cfg.speed_of_light_mps);
      crb_delay_list.push_back(crb);
      crb_range_list.push_back(r);
      worst = std::max(worst, r);
    }
  }
  s["crb_delay_s2_per_path"] = crb_delay_list;
  s["crb_range_m_per_path"] = crb_range_list;
  s["crb_range_m_worst"] = worst;
  return s;
}

int cmd_optimize(const CommonArgs& args) {
  const isac::RunConfig rc = load_config(args);
  fs::create_directories(rc.output.dir);
  std::vector<std::string> outputs = {"waveform.csv", "summary.json"};
  if (rc.output.write_trace) outputs.push_back("trace.csv");
  write_manifest(rc, args, "optimize", outputs);

  const isac::ChannelResponse channel =
      isac::channel_response(rc.scenario.config, rc.scenario.paths);
  isac::OptimizerConfig opt = rc.optimizer;
  opt.record_trace = rc.output.write_trace;
  const isac::OptimizationResult res =
      isac::optimize(channel, rc.scenario.paths, rc.scenario.config, opt);

  const fs::path dir(rc.output.dir);
  isac::write_text_file((dir / "waveform.csv").string(),
                        isac::waveform_csv(res.waveform, channel));
  isac::write_text_file((dir / "summary.json").string(),
                        summary_json(rc, res).dump(2) + "\n");
  if (rc.output.write_trace) {
    isac::write_text_file((dir / "trace.csv").string(), isac::trace_csv(res.trace));
  }

  if (!args.quiet) {
    std::cout << (res.feasible ? "feasible" : "INFEASIBLE") << "  cdr=" << res.cdr
              << " bit/s/Hz  W=" << res.effective_bandwidth
              << "  sensing=" << res.waveform.sensing_count() << "/" << res.waveform.size()
              << "  power=" << res.waveform.total_power() << " W"
              << "  iterations=" << res.iterations_used << "\n";
  }
  return res.feasible ? kExitOk : kExitInfeasible;
}

int cmd_sweep(const CommonArgs& args) {
  const isac::RunConfig rc = load_config(args);
  fs::create_directories(rc.output.dir);
  write_manifest(rc, args, "sweep",
                 {"aggregate.csv", "fig3_data.csv", "fig4_data.csv"});

  // Inner sweep axis: the bounds when several are given, otherwise the
  // budgets; the other axis runs as an outer loop of independent sweeps.
  const bool inner_bounds = rc.bounds_m.size() > 1;
  const std::vector<double>& outer = inner_bounds ? rc.budgets_w : rc.bounds_m;
  const std::vector<double>& inner = inner_bounds ? rc.bounds_m : rc.budgets_w;

  std::string aggregate;
  std::string fig3 = "method,total_budget_w,range_bound_m,mean_cdr_bps_hz,feasible\n";
  std::string fig4 =
      "method,total_budget_w,range_bound_m,mean_cdr_bps_hz,crb_range_m,rmse_range_m,"
      "rmse_worst_path_m,feasibility_rate,n_sensing_mean\n";
  bool all_feasible = true;

  for (double outer_value : outer) {
    isac::Scenario scenario = rc.scenario;
    if (inner_bounds) {
      scenario.config.total_budget_w = outer_value;
    } else {
      scenario.config.delay_error_bound_s = outer_value / scenario.config.speed_of_light_mps;
    }
    isac::SweepSpec spec = rc.sweep;
    spec.param = inner_bounds ? isac::SweepParam::RangeBoundM : isac::SweepParam::TotalBudgetW;
    spec.values = inner;
    const isac::SweepResult result = isac::run_sweep(spec, scenario);

    const std::string chunk = isac::aggregate_csv(result);
    if (aggregate.empty()) {
      aggregate = chunk;
    } else {
      aggregate += chunk.substr(chunk.find('\n') + 1);
    }

    for (const isac::PointResult& pr : result.points) {
      all_feasible = all_feasible && pr.feasible;
      const double budget = inner_bounds ? outer_value : pr.sweep_value;
      const double bound = inner_bounds ? pr.sweep_value : outer_value;
      double worst_path = std::numeric_limits<double>::quiet_NaN();
      for (double r : pr.rmse_range_per_path_m) {
        if (std::isnan(worst_path) || r > worst_path) worst_path = r;
      }
      fig3 += isac::method_name(pr.method) + "," + isac::format_double(budget) + "," +
              isac::format_double(bound) + "," + isac::format_double(pr.cdr_bps_hz) + "," +
              (pr.feasible ? "1" : "0") + "\n";
      fig4 += isac::method_name(pr.method) + "," + isac::format_double(budget) + "," +
              isac::format_double(bound) + "," + isac::format_double(pr.cdr_bps_hz) + "," +
              isac::format_double(pr.crb_range_m) + "," + isac::format_double(pr.rmse_range_m) +
              "," + isac::format_double(worst_path) + "," +
              isac::format_double(pr.feasibility_rate) + "," +
              isac::format_double(pr.n_sensing_mean) + "\n";
    }
    if (!args.quiet) {
      std::cout << "sweep " << (inner_bounds ? "budget=" : "bound=") << outer_value << ": "
                << result.points.size() << " points done\n";
    }
  }

  const fs::path dir(rc.output.dir);
  isac::write_text_file((dir / "aggregate.csv").string(), aggregate);
  isac::write_text_file((dir / "fig3_data.csv").string(), fig3);
  isac::write_text_file((dir / "fig4_data.csv").string(), fig4);
  return all_feasible ? kExitOk : kExitInfeasible;
}

int cmd_estimate(const CommonArgs& args, const std::string& waveform_path) {
  const isac::RunConfig rc = load_config(args);
  const isac::SystemConfig& cfg = rc.scenario.config;
  const isac::ParsedWaveform pw = isac::parse_waveform_csv(isac::read_text_file(waveform_path));
  if (pw.waveform.size() != cfg.num_subcarriers) {
    throw isac::ConfigError("waveform has " + std::to_string(pw.waveform.size()) +
                            " subcarriers but the scenario has " +
                            std::to_string(cfg.num_subcarriers));
  }
  pw.waveform.validate(cfg);

  fs::create_directories(rc.output.dir);
  write_manifest(rc, args, "estimate", {"trials.csv"});

  int powered = 0;
  for (int m = 0; m < pw.waveform.size(); ++m) {
    powered += pw.waveform.assignment[static_cast<size_t>(m)] != 0.0 &&
               pw.waveform.power[static_cast<size_t>(m)] > 0.0;
  }
  if (powered < 2) {
    std::cerr << "estimate: waveform has fewer than two powered sensing subcarriers\n";
    return kExitInfeasible;
  }

  const isac::ChannelResponse channel = isac::channel_response(cfg, rc.scenario.paths);
  const int P = rc.scenario.paths.count();
  const int T = std::max(rc.sweep.trials, 1);
  const double period = 1.0 / cfg.subcarrier_spacing_hz;

  struct Row {
    int trial, path;
    double tau_true, tau_hat, range_err, coeff_err;
    bool low_confidence, ok;
  };
  std::vector<Row> rows(static_cast<size_t>(T) * static_cast<size_t>(P));

#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < T; ++t) {
    const uint64_t trial_seed = isac::derive_seed(rc.seed, 0xe571u, static_cast<uint64_t>(t));
    for (int p = 0; p < P; ++p) {
      Row& row = rows[static_cast<size_t>(t) * P + static_cast<size_t>(p)];
      row.trial = t;
      row.path = p;
      row.tau_true = rc.scenario.paths.paths[static_cast<size_t>(p)].delay_s;
      row.tau_hat = std::numeric_limits<double>::quiet_NaN();
      row.range_err = std::numeric_limits<double>::quiet_NaN();
      row.coeff_err = std::numeric_limits<double>::quiet_NaN();
      row.low_confidence = false;
      row.ok = false;
    }
    try {
      const isac::RxSnapshot snap = isac::simulate_rx(channel, pw.waveform, trial_seed, cfg);
      const std::vector<isac::AoaEstimate> aoas =
          isac::estimate_aoa(snap, cfg, P, rc.sweep.aoa_grid_size);
      for (int p = 0; p < P; ++p) {
        const isac::Path& truth = rc.scenario.paths.paths[static_cast<size_t>(p)];
        const double ct = std::cos(truth.aoa_rad);
        size_t best = 0;
        for (size_t e = 1; e < aoas.size(); ++e) {
          if (std::abs(aoas[e].cos_aoa - ct) < std::abs(aoas[best].cos_aoa - ct)) best = e;
        }
        const std::vector<isac::cdouble> ytilde =
            isac::extract_path(snap, aoas[best].aoa_rad);
        const isac::PathEstimate est = isac::estimate_delay(ytilde, pw.waveform, cfg);
        Row& row = rows[static_cast<size_t>(t) * P + static_cast<size_t>(p)];
        row.tau_hat = est.delay_s;
        double d = std::abs(est.delay_s - truth.delay_s);
        d = std::min(d, period - d);
        row.range_err = cfg.speed_of_light_mps * d;
        row.coeff_err = std::abs(est.coefficient - truth.coefficient);
        row.low_confidence = aoas[best].low_confidence;
        row.ok = true;
      }
    } catch (const std::exception&) {
      // rows stay marked failed
    }
  }

  std::string csv =
      "trial,path,tau_true_s,tau_hat_s,range_err_m,b_err_abs,low_confidence,ok\n";
  double pooled = 0;
  int pooled_n = 0;
  for (const Row& row : rows) {
    csv += std::to_string(row.trial) + "," + std::to_string(row.path) + "," +
           isac::format_double(row.tau_true) + "," + isac::format_double(row.tau_hat) + "," +
           isac::format_double(row.range_err) + "," + isac::format_double(row.coeff_err) + "," +
           (row.low_confidence ? "1" : "0") + "," + (row.ok ? "1" : "0") + "\n";
    if (row.ok) {
      pooled += row.range_err * row.range_err;
      ++pooled_n;
    }
  }
  isac::write_text_file((fs::path(rc.output.dir) / "trials.csv").string(), csv);

  if (!args.quiet) {
    const double rmse = pooled_n > 0 ? std::sqrt(pooled / pooled_n)
                                     : std::numeric_limits<double>::quiet_NaN();
    std::cout << "trials=" << T << "  resolved=" << pooled_n << "/" << T * P
              << "  rmse_range=" << rmse << " m  bound=" << cfg.range_error_bound_m() << " m\n";
  }
  return kExitOk;
}

int cmd_compare(const CommonArgs& args, const std::string& aggregate_path) {
  const isac::RunConfig rc = load_config(args);
  const std::string text = isac::read_text_file(
      aggregate_path.empty() ? (fs::path(rc.output.dir) / "aggregate.csv").string()
                             : aggregate_path);

  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "method,sweep_param,sweep_value,mean_cdr_bps_hz,crb_range_m,rmse_range_m,"
              "feasibility_rate,n_sensing_mean") {
    throw isac::ConfigError("aggregate csv: unexpected header");
  }

  struct Entry {
    isac::Method method;
    std::string param;
    double value, cdr, rate;
  };
  std::vector<Entry> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (f.size() != 8) throw isac::ConfigError("aggregate csv: expected 8 columns");
    const auto m = isac::method_from_name(f[0]);
    if (!m) throw isac::ConfigError("aggregate csv: unknown method " + f[0]);
    entries.push_back(Entry{*m, f[1], std::stod(f[2]), std::stod(f[3]), std::stod(f[6])});
  }

  // Rank within consecutive rows sharing a sweep value; grid outputs are
  // written block-wise, so consecutive grouping reconstructs each block.
  std::string csv = "sweep_param,sweep_value,rank,method,mean_cdr_bps_hz\n";
  size_t i = 0;
  int violations = 0;
  while (i < entries.size()) {
    size_t j = i;
    while (j < entries.size() && entries[j].value == entries[i].value &&
           entries[j].param == entries[i].param) {
      ++j;
    }
    std::vector<const Entry*> group;
    for (size_t k = i; k < j; ++k) {
      if (entries[k].rate > 0) group.push_back(&entries[k]);
    }
    std::stable_sort(group.begin(), group.end(),
                     [](const Entry* a, const Entry* b) { return a->cdr > b->cdr; });
    for (size_t r = 0; r < group.size(); ++r) {
      csv += group[r]->param + "," + isac::format_double(group[r]->value) + "," +
             std::to_string(r + 1) + "," + isac::method_name(group[r]->method) + "," +
             isac::format_double(group[r]->cdr) + "\n";
    }
    const auto cdr_of = [&](isac::Method m) -> const double* {
      for (const Entry* e : group) {
        if (e->method == m) return &e->cdr;
      }
      return nullptr;
    };
    const std::pair<isac::Method, isac::Method> expected[] = {
        {isac::Method::Jpcde, isac::Method::Saupa},
        {isac::Method::Jpcde, isac::Method::Rsapa},
        {isac::Method::Jpcde, isac::Method::Rsaupa},
        {isac::Method::Saupa, isac::Method::Rsaupa},
        {isac::Method::Rsapa, isac::Method::Rsaupa},
    };
    for (const auto& [hi, lo] : expected) {
      const double* a = cdr_of(hi);
      const double* b = cdr_of(lo);
      if (a && b && *a < *b * (1.0 - 1e-9)) {
        ++violations;
        if (!args.quiet) {
          std::cerr << "ordering violation: " << isac::method_name(hi) << " ("
                    << *a << ") < " << isac::method_name(lo) << " (" << *b << ") at "
                    << entries[i].param << "=" << entries[i].value << "\n";
        }
      }
    }
    i = j;
  }

  fs::create_directories(rc.output.dir);
  isac::write_text_file((fs::path(rc.output.dir) / "compare.csv").string(), csv);
  if (!args.quiet) {
    std::cout << "compare: " << violations << " ordering violation(s)\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bistatic OFDM ISAC waveform design and receiver simulation"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string waveform_path;
  std::string aggregate_path;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "JSON run configuration");
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", args.seed, "master seed (overrides config)")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--trials", args.trials, "Monte Carlo trials (overrides config)");
    cmd->add_option("--threads", args.threads, "OpenMP threads (or env ISAC_THREADS)");
    cmd->add_flag("--quiet", args.quiet, "suppress progress output");
  };

  CLI::App* optimize = app.add_subcommand("optimize", "design one waveform");
  add_common(optimize);
  CLI::App* sweep = app.add_subcommand("sweep", "run the configured sweep grid");
  add_common(sweep);
  CLI::App* estimate = app.add_subcommand("estimate", "Monte Carlo receiver trials on a waveform");
  add_common(estimate);
  estimate->add_option("--waveform", waveform_path, "waveform.csv to evaluate")->required();
  CLI::App* compare = app.add_subcommand("compare", "rank methods from an aggregate csv");
  add_common(compare);
  compare->add_option("--in", aggregate_path, "aggregate.csv (default <out>/aggregate.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize->parsed()) return cmd_optimize(args);
    if (sweep->parsed()) return cmd_sweep(args);
    if (estimate->parsed()) return cmd_estimate(args, waveform_path);
    if (compare->parsed()) return cmd_compare(args, aggregate_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
