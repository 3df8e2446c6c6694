#include "isac/sensing_crb.hpp"

#include <cmath>

namespace isac {

namespace {

struct SensingMoments {
  double s0 = 0;  // sum P u
  double s1 = 0;  // sum P u m
  double s2 = 0;  // sum P u m^2
};

SensingMoments moments(std::span<const double> assignment, std::span<const double> power) {
  SensingMoments mo;
  for (size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != 0.0) {
      const double m = static_cast<double>(i + 1);
      mo.s0 += power[i];
      mo.s1 += power[i] * m;
      mo.s2 += power[i] * m * m;
    }
  }
  return mo;
}

}  // namespace

double effective_bandwidth(std::span<const double> assignment, std::span<const double> power) {
  const SensingMoments mo = moments(assignment, power);
  if (mo.s0 <= 0.0) return 0.0;
  return mo.s2 - mo.s1 * mo.s1 / mo.s0;
}

double sensing_centroid(std::span<const double> assignment, std::span<const double> power) {
  const SensingMoments mo = moments(assignment, power);
  if (mo.s0 <= 0.0) throw EmptySensingSet("sensing set carries no power");
  return mo.s1 / mo.s0;
}

Fim3 fisher_information(std::span<const double> assignment, std::span<const double> power,
                        const SystemConfig& cfg, const Path& path) {
  const SensingMoments mo = moments(assignment, power);
  const double df = cfg.subcarrier_spacing_hz;
  const double scale = 2.0 * cfg.num_rx_antennas / cfg.noise_power_w;
  const double b2 = std::norm(path.coefficient);
  const double re_b = path.coefficient.real();
  const double im_b = path.coefficient.imag();

  const double j_tt = scale * 4.0 * M_PI * M_PI * df * df * mo.s2 * b2;
  const double j_tr = scale * 2.0 * M_PI * df * mo.s1 * im_b;
  const double j_ti = scale * (-2.0 * M_PI) * df * mo.s1 * re_b;
  const double j_rr = scale * mo.s0;

  return Fim3{j_tt, j_tr, j_ti,
              j_tr, j_rr, 0.0,
              j_ti, 0.0, j_rr};
}

double crb_delay(std::span<const double> assignment, std::span<const double> power,
                 const SystemConfig& cfg, const Path& path) {
  const double W = effective_bandwidth(assignment, power);
  if (W <= 0.0) throw InfeasibleSensing("effective bandwidth is zero; delay is unidentifiable");
  const double df = cfg.subcarrier_spacing_hz;
  const double b2 = std::norm(path.coefficient);
  return cfg.noise_power_w / (8.0 * cfg.num_rx_antennas * b2 * M_PI * M_PI * df * df * W);
}

double range_error(double crb_delay_s2, double speed_of_light_mps) {
  return speed_of_light_mps * std::sqrt(crb_delay_s2);
}

SensingRequirement sensing_requirement(const SystemConfig& cfg, const PathSet& paths) {
  SensingRequirement req;
  const double df = cfg.subcarrier_spacing_hz;
  const double j0 = cfg.delay_error_bound_s;
  const double denom_common = 8.0 * cfg.num_rx_antennas * M_PI * M_PI * df * df * j0 * j0;
  req.per_path.reserve(paths.paths.size());
  for (const Path& p : paths.paths) {
    const double w_req = cfg.noise_power_w / (denom_common * std::norm(p.coefficient));
    req.per_path.push_back(w_req);
    req.binding = std::max(req.binding, w_req);
  }
  return req;
}

}  // namespace isac
