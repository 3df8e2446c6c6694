#include "isac/types.hpp"

#include <cmath>
#include <sstream>

namespace isac {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

std::vector<std::string> SystemConfig::validate() const {
  require(num_subcarriers >= 2, "num_subcarriers must be >= 2");
  require(subcarrier_spacing_hz > 0, "subcarrier_spacing_hz must be > 0");
  require(num_rx_antennas >= 1, "num_rx_antennas must be >= 1");
  require(noise_power_w > 0, "noise_power_w must be > 0");
  require(per_subcarrier_cap_w > 0, "per_subcarrier_cap_w must be > 0");
  require(total_budget_w > 0, "total_budget_w must be > 0");
  require(delay_error_bound_s > 0, "delay_error_bound_s must be > 0");
  require(speed_of_light_mps > 0, "speed_of_light_mps must be > 0");

  std::vector<std::string> warnings;
  const double cap_sum = per_subcarrier_cap_w * num_subcarriers;
  if (total_budget_w > cap_sum) {
    std::ostringstream os;
    os << "total_budget_w (" << total_budget_w << " W) exceeds the per-subcarrier cap sum ("
       << cap_sum << " W); the budget constraint can never bind";
    warnings.push_back(os.str());
  }
  return warnings;
}

void PathSet::validate(const SystemConfig& cfg) const {
  require(!paths.empty(), "path set must not be empty");
  const double delay_limit = 1.0 / cfg.subcarrier_spacing_hz;
  for (size_t p = 0; p < paths.size(); ++p) {
    const Path& path = paths[p];
    std::ostringstream tag;
    tag << "path " << p << ": ";
    require(std::abs(path.coefficient) > 0, tag.str() + "coefficient must be nonzero");
    require(path.delay_s >= 0 && path.delay_s < delay_limit,
            tag.str() + "delay must lie in [0, 1/subcarrier_spacing)");
    require(path.aoa_rad > 0 && path.aoa_rad < M_PI, tag.str() + "aoa must lie in (0, pi)");
  }
  const double min_sep = 2.0 / cfg.num_rx_antennas;
  for (size_t p = 0; p < paths.size(); ++p) {
    for (size_t q = p + 1; q < paths.size(); ++q) {
      const double sep = std::abs(std::cos(paths[p].aoa_rad) - std::cos(paths[q].aoa_rad));
      if (sep < min_sep) {
        std::ostringstream os;
        os << "paths " << p << " and " << q << " are angularly too close: |cos separation| "
           << sep << " < " << min_sep;
        throw ConfigError(os.str());
      }
    }
  }
}

int Waveform::sensing_count() const {
  int k = 0;
  for (double u : assignment) k += (u != 0.0);
  return k;
}

double Waveform::total_power() const {
  double s = 0;
  for (double p : power) s += p;
  return s;
}

void Waveform::validate(const SystemConfig& cfg) const {
  const size_t M = static_cast<size_t>(cfg.num_subcarriers);
  if (assignment.size() != M || power.size() != M)
    throw std::invalid_argument("waveform arrays must have num_subcarriers entries");
  for (size_t m = 0; m < M; ++m) {
    if (assignment[m] != 0.0 && assignment[m] != 1.0)
      throw std::invalid_argument("assignment entries must be exactly 0 or 1");
    if (!(power[m] >= 0.0) || power[m] > cfg.per_subcarrier_cap_w * (1.0 + 1e-12))
      throw std::invalid_argument("power entries must lie in [0, per_subcarrier_cap]");
  }
  const double eps_pow = 1e-2 * std::max(1.0, cfg.total_budget_w);
  if (total_power() > cfg.total_budget_w + eps_pow)
    throw std::invalid_argument("total power exceeds the budget");
}

}  // namespace isac
