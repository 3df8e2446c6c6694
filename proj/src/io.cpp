#include "isac/io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace isac {

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 12);
  return std::string(buf.data(), ptr);
}

namespace {

inline uint32_t rotl32(uint32_t x, int s) { return (x << s) | (x >> (32 - s)); }

double parse_double(std::string_view s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("malformed numeric field '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string sha1_hex(std::string_view data) {
  uint32_t h[5] = {0x67452301u, 0xefcdab89u, 0x98badcfeu, 0x10325476u, 0xc3d2e1f0u};

  const uint64_t bit_len = static_cast<uint64_t>(data.size()) * 8;
  std::string padded(data);
  padded.push_back(static_cast<char>(0x80));
  while (padded.size() % 64 != 56) padded.push_back('\0');
  for (int i = 7; i >= 0; --i) padded.push_back(static_cast<char>((bit_len >> (8 * i)) & 0xff));

  uint32_t w[80];
  for (size_t chunk = 0; chunk < padded.size(); chunk += 64) {
    const unsigned char* block = reinterpret_cast<const unsigned char*>(padded.data() + chunk);
    for (int i = 0; i < 16; ++i) {
      w[i] = (static_cast<uint32_t>(block[4 * i]) << 24) |
             (static_cast<uint32_t>(block[4 * i + 1]) << 16) |
             (static_cast<uint32_t>(block[4 * i + 2]) << 8) |
             static_cast<uint32_t>(block[4 * i + 3]);
    }
    for (int i = 16; i < 80; ++i) {
      w[i] = rotl32(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    }
    uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5a827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ed9eba1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8f1bbcdcu;
      } else {
        f = b ^ c ^ d;
        k = 0xca62c1d6u;
      }
      const uint32_t tmp = rotl32(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rotl32(b, 30);
      b = a;
      a = tmp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  std::string hex;
  hex.reserve(40);
  for (uint32_t word : h) {
    for (int shift = 28; shift >= 0; shift -= 4) {
      hex.push_back("0123456789abcdef"[(word >> shift) & 0xf]);
    }
  }
  return hex;
}

std::string git_blob_sha1(std::string_view content) {
  std::string prefixed = "blob " + std::to_string(content.size());
  prefixed.push_back('\0');
  prefixed.append(content);
  return sha1_hex(prefixed);
}

std::string aggregate_csv(const SweepResult& result) {
  std::string out =
      "method,sweep_param,sweep_value,mean_cdr_bps_hz,crb_range_m,rmse_range_m,"
      "feasibility_rate,n_sensing_mean\n";
  for (const PointResult& pr : result.points) {
    out += method_name(pr.method);
    out += ',';
    out += sweep_param_name(pr.param);
    out += ',';
    out += format_double(pr.sweep_value);
    out += ',';
    out += format_double(pr.cdr_bps_hz);
    out += ',';
    out += format_double(pr.crb_range_m);
    out += ',';
    out += format_double(pr.rmse_range_m);
    out += ',';
    out += format_double(pr.feasibility_rate);
    out += ',';
    out += format_double(pr.n_sensing_mean);
    out += '\n';
  }
  return out;
}

std::string waveform_csv(const Waveform& w, const ChannelResponse& channel) {
  std::string out = "m,u_m,P_m_watts,gain\n";
  for (int m = 0; m < w.size(); ++m) {
    const size_t mi = static_cast<size_t>(m);
    out += std::to_string(m + 1);
    out += ',';
    out += w.assignment[mi] != 0.0 ? '1' : '0';
    out += ',';
    out += format_double(w.power[mi]);
    out += ',';
    out += format_double(channel.gains[mi]);
    out += '\n';
  }
  return out;
}

ParsedWaveform parse_waveform_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "m,u_m,P_m_watts,gain") {
    throw ConfigError("waveform csv: bad or missing header");
  }
  ParsedWaveform pw;
  int expect = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4) throw ConfigError("waveform csv: expected 4 columns");
    const double m = parse_double(fields[0]);
    if (m != expect) throw ConfigError("waveform csv: subcarrier indices must be 1..M in order");
    ++expect;
    const double u = parse_double(fields[1]);
    if (u != 0.0 && u != 1.0) throw ConfigError("waveform csv: u_m must be 0 or 1");
    pw.waveform.assignment.push_back(u);
    pw.waveform.power.push_back(parse_double(fields[2]));
    pw.gains.push_back(parse_double(fields[3]));
  }
  if (pw.waveform.assignment.empty()) throw ConfigError("waveform csv: no rows");
  return pw;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "iteration,cdr_bps_hz,effective_bandwidth,lambda,mu,n_sensing,feasible\n";
  for (const TraceRow& row : trace) {
    out += std::to_string(row.iteration);
    out += ',';
    out += format_double(row.cdr);
    out += ',';
    out += format_double(row.effective_bandwidth);
    out += ',';
    out += format_double(row.lambda);
    out += ',';
    out += format_double(row.mu);
    out += ',';
    out += std::to_string(row.sensing_count);
    out += ',';
    out += row.feasible ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw ConfigError("short write: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace isac
