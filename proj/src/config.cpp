#include "isac/config.hpp"

#include <json.hpp>

#include "isac/io.hpp"

namespace isac {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& section,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown key '" + key + "' in " + section);
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void parse_scenario(const json& j, RunConfig& rc) {
  reject_unknown(j, "scenario",
                 {"label", "num_subcarriers", "subcarrier_spacing_hz", "num_rx_antennas",
                  "noise_power_w", "per_subcarrier_cap_w", "total_budget_w",
                  "range_error_bound_m", "delay_error_bound_s", "speed_of_light_mps",
                  "carrier_frequency_hz", "num_paths", "paths"});
  SystemConfig& cfg = rc.scenario.config;
  read_field(j, "label", rc.scenario.label);
  read_field(j, "num_subcarriers", cfg.num_subcarriers);
  read_field(j, "subcarrier_spacing_hz", cfg.subcarrier_spacing_hz);
  read_field(j, "num_rx_antennas", cfg.num_rx_antennas);
  read_field(j, "noise_power_w", cfg.noise_power_w);
  read_field(j, "per_subcarrier_cap_w", cfg.per_subcarrier_cap_w);
  read_field(j, "total_budget_w", cfg.total_budget_w);
  read_field(j, "speed_of_light_mps", cfg.speed_of_light_mps);
  read_field(j, "carrier_frequency_hz", cfg.carrier_frequency_hz);
  if (j.contains("range_error_bound_m") && j.contains("delay_error_bound_s")) {
    throw ConfigError("scenario: give either range_error_bound_m or delay_error_bound_s, not both");
  }
  if (j.contains("range_error_bound_m")) {
    cfg.delay_error_bound_s = j.at("range_error_bound_m").get<double>() / cfg.speed_of_light_mps;
  }
  read_field(j, "delay_error_bound_s", cfg.delay_error_bound_s);
  read_field(j, "num_paths", rc.num_paths);
  if (j.contains("paths")) {
    rc.explicit_paths = true;
    rc.scenario.paths.paths.clear();
    for (const json& pj : j.at("paths")) {
      reject_unknown(pj, "scenario.paths[]", {"delay_s", "aoa_rad", "coefficient"});
      Path p;
      p.delay_s = pj.at("delay_s").get<double>();
      p.aoa_rad = pj.at("aoa_rad").get<double>();
      const json& c = pj.at("coefficient");
      if (!c.is_array() || c.size() != 2) {
        throw ConfigError("scenario.paths[].coefficient must be [re, im]");
      }
      p.coefficient = {c.at(0).get<double>(), c.at(1).get<double>()};
      rc.scenario.paths.paths.push_back(p);
    }
    rc.num_paths = rc.scenario.paths.count();
  }
}

void parse_optimizer(const json& j, OptimizerConfig& opt) {
  reject_unknown(j, "optimizer",
                 {"max_iterations", "step_lambda", "step_mu", "eps_lagrangian",
                  "stall_iterations", "eps_feasibility", "tie_epsilon"});
  read_field(j, "max_iterations", opt.max_iterations);
  read_field(j, "step_lambda", opt.step_lambda);
  read_field(j, "step_mu", opt.step_mu);
  read_field(j, "eps_lagrangian", opt.eps_lagrangian);
  read_field(j, "stall_iterations", opt.stall_iterations);
  read_field(j, "eps_feasibility", opt.eps_feasibility);
  read_field(j, "tie_epsilon", opt.tie_epsilon);
  if (opt.max_iterations < 1) throw ConfigError("optimizer.max_iterations must be >= 1");
  if (opt.step_lambda <= 0 || opt.step_mu <= 0)
    throw ConfigError("optimizer step sizes must be > 0");
}

void parse_sweep(const json& j, RunConfig& rc) {
  reject_unknown(j, "sweep",
                 {"budgets_w", "bounds_m", "trials", "methods", "sensing_fraction",
                  "aoa_grid_size"});
  read_field(j, "budgets_w", rc.budgets_w);
  read_field(j, "bounds_m", rc.bounds_m);
  read_field(j, "trials", rc.sweep.trials);
  read_field(j, "sensing_fraction", rc.sweep.sensing_fraction);
  read_field(j, "aoa_grid_size", rc.sweep.aoa_grid_size);
  if (j.contains("methods")) {
    rc.sweep.methods.clear();
    for (const json& mj : j.at("methods")) {
      const std::string name = mj.get<std::string>();
      const auto m = method_from_name(name);
      if (!m) throw ConfigError("sweep.methods: unknown method '" + name + "'");
      rc.sweep.methods.push_back(*m);
    }
  }
}

void parse_output(const json& j, OutputSpec& out) {
  reject_unknown(j, "output", {"dir", "write_trace"});
  read_field(j, "dir", out.dir);
  read_field(j, "write_trace", out.write_trace);
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid json: ") + e.what());
  }
  RunConfig rc;
  rc.scenario = Scenario{};
  {
    // defaults match default_scenario; paths get drawn in materialize_scenario
    const Scenario ref = default_scenario(1);
    rc.scenario.config = ref.config;
    rc.scenario.label = ref.label;
  }
  try {
    reject_unknown(j, "top level", {"seed", "scenario", "optimizer", "sweep", "output"});
    read_field(j, "seed", rc.seed);
    if (j.contains("scenario")) parse_scenario(j.at("scenario"), rc);
    if (j.contains("optimizer")) parse_optimizer(j.at("optimizer"), rc.optimizer);
    if (j.contains("sweep")) parse_sweep(j.at("sweep"), rc);
    if (j.contains("output")) parse_output(j.at("output"), rc.output);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  rc.scenario.seed = rc.seed;
  rc.sweep.optimizer = rc.optimizer;
  if (rc.budgets_w.empty()) rc.budgets_w = {rc.scenario.config.total_budget_w};
  if (rc.bounds_m.empty()) rc.bounds_m = {rc.scenario.config.range_error_bound_m()};
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_text_file(path));
}

void materialize_scenario(RunConfig& rc) {
  rc.scenario.seed = rc.seed;
  rc.scenario.config.validate();
  if (!rc.explicit_paths) {
    rc.scenario.paths = draw_paths(rc.scenario.config, rc.num_paths, rc.seed);
  }
  rc.scenario.paths.validate(rc.scenario.config);
}

std::string canonical_config_json(const RunConfig& rc) {
  json j;
  j["seed"] = rc.seed;
  json sc;
  const SystemConfig& cfg = rc.scenario.config;
  sc["label"] = rc.scenario.label;
  sc["num_subcarriers"] = cfg.num_subcarriers;
  sc["subcarrier_spacing_hz"] = cfg.subcarrier_spacing_hz;
  sc["num_rx_antennas"] = cfg.num_rx_antennas;
  sc["noise_power_w"] = cfg.noise_power_w;
  sc["per_subcarrier_cap_w"] = cfg.per_subcarrier_cap_w;
  sc["total_budget_w"] = cfg.total_budget_w;
  sc["delay_error_bound_s"] = cfg.delay_error_bound_s;
  sc["speed_of_light_mps"] = cfg.speed_of_light_mps;
  sc["carrier_frequency_hz"] = cfg.carrier_frequency_hz;
  json paths = json::array();
  for (const Path& p : rc.scenario.paths.paths) {
    json pj;
    pj["delay_s"] = p.delay_s;
    pj["coefficient"] = {p.coefficient.real(), p.coefficient.imag()};
    pj["aoa_rad"] = p.aoa_rad;
    paths.push_back(pj);
  }
  sc["paths"] = paths;
  j["scenario"] = sc;
  json opt;
  opt["max_iterations"] = rc.optimizer.max_iterations;
  opt["step_lambda"] = rc.optimizer.step_lambda;
  opt["step_mu"] = rc.optimizer.step_mu;
  opt["eps_lagrangian"] = rc.optimizer.eps_lagrangian;
  opt["stall_iterations"] = rc.optimizer.stall_iterations;
  opt["eps_feasibility"] = rc.optimizer.eps_feasibility;
  opt["tie_epsilon"] = rc.optimizer.tie_epsilon;
  j["optimizer"] = opt;
  json sw;
  sw["budgets_w"] = rc.budgets_w;
  sw["bounds_m"] = rc.bounds_m;
  sw["trials"] = rc.sweep.trials;
  json methods = json::array();
  for (Method m : rc.sweep.methods) methods.push_back(method_name(m));
  sw["methods"] = methods;
  sw["sensing_fraction"] = rc.sweep.sensing_fraction;
  sw["aoa_grid_size"] = rc.sweep.aoa_grid_size;
  j["sweep"] = sw;
  json out;
  out["dir"] = rc.output.dir;
  out["write_trace"] = rc.output.write_trace;
  j["output"] = out;
  return j.dump(2);
}

}  // namespace isac
