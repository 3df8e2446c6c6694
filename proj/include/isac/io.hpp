// Locale-independent text output and content hashing for run manifests.
#pragma once

#include <string>
#include <string_view>

#include "isac/harness.hpp"
#include "isac/types.hpp"

namespace isac {

// General-format decimal with 12 significant digits via to_chars; never
// consults the locale. NaN prints as "nan", infinities as "inf"/"-inf".
std::string format_double(double v);

std::string sha1_hex(std::string_view data);
// SHA-1 of "blob <len>\0<content>", the git object id of the content.
std::string git_blob_sha1(std::string_view content);

// Aggregate CSV, exactly these columns:
// method,sweep_param,sweep_value,mean_cdr_bps_hz,crb_range_m,rmse_range_m,feasibility_rate,n_sensing_mean
std::string aggregate_csv(const SweepResult& result);

// waveform.csv: m,u_m,P_m_watts,gain
std::string waveform_csv(const Waveform& w, const ChannelResponse& channel);

struct ParsedWaveform {
  Waveform waveform;
  std::vector<double> gains;
};
ParsedWaveform parse_waveform_csv(const std::string& text);

std::string trace_csv(const std::vector<TraceRow>& trace);

void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace isac
