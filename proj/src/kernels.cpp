#include "isac/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace isac::kernels {

namespace {

inline void channel_row(int m, int Nr, double spacing_hz, std::span<const Path> paths,
                        cdouble* row, double* gain) {
  for (int n = 0; n < Nr; ++n) row[n] = {0.0, 0.0};
  for (const Path& p : paths) {
    const double delay_phase = -2.0 * M_PI * (m + 1) * spacing_hz * p.delay_s;
    const cdouble b = p.coefficient * std::polar(1.0, delay_phase);
    const double cospsi = std::cos(p.aoa_rad);
    for (int n = 0; n < Nr; ++n) {
      row[n] += b * std::polar(1.0, -M_PI * n * cospsi);
    }
  }
  double g = 0;
  for (int n = 0; n < Nr; ++n) g += std::norm(row[n]);
  *gain = g;
}

inline double spectrum_point(std::span<const cdouble> z, double c) {
  cdouble acc{0.0, 0.0};
  for (size_t n = 0; n < z.size(); ++n) {
    acc += std::polar(1.0, M_PI * static_cast<double>(n) * c) * z[n];
  }
  return std::abs(acc) / std::sqrt(static_cast<double>(z.size()));
}

inline cdouble profile_point_direct(std::span<const cdouble> q, double angle_step) {
  cdouble acc{0.0, 0.0};
  for (size_t m = 1; m < q.size(); ++m) {
    if (q[m] != cdouble{0.0, 0.0}) {
      acc += q[m] * std::polar(1.0, angle_step * static_cast<double>(m));
    }
  }
  return acc;
}

}  // namespace

void synth_channel(int M, int Nr, double spacing_hz, std::span<const Path> paths,
                   cdouble* h, double* gains) {
#pragma omp parallel for schedule(static)
  for (int m = 0; m < M; ++m) {
    channel_row(m, Nr, spacing_hz, paths, h + static_cast<size_t>(m) * Nr, gains + m);
  }
}

void synth_channel_serial(int M, int Nr, double spacing_hz, std::span<const Path> paths,
                          cdouble* h, double* gains) {
  for (int m = 0; m < M; ++m) {
    channel_row(m, Nr, spacing_hz, paths, h + static_cast<size_t>(m) * Nr, gains + m);
  }
}

void masked_antenna_sum(int M, int Nr, const cdouble* y, std::span<const double> mask,
                        cdouble* z) {
  for (int n = 0; n < Nr; ++n) z[n] = {0.0, 0.0};
  for (int m = 0; m < M; ++m) {
    if (mask[m] != 0.0) {
      const cdouble* row = y + static_cast<size_t>(m) * Nr;
      for (int n = 0; n < Nr; ++n) z[n] += row[n];
    }
  }
}

void spatial_spectrum(std::span<const cdouble> z, std::span<const double> cos_grid,
                      double* out) {
  const int G = static_cast<int>(cos_grid.size());
#pragma omp parallel for schedule(static)
  for (int g = 0; g < G; ++g) out[g] = spectrum_point(z, cos_grid[g]);
}

void spatial_spectrum_serial(std::span<const cdouble> z, std::span<const double> cos_grid,
                             double* out) {
  const int G = static_cast<int>(cos_grid.size());
  for (int g = 0; g < G; ++g) out[g] = spectrum_point(z, cos_grid[g]);
}

void fft_pow2(std::span<cdouble> x, int sign) {
  const size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("fft length must be a nonzero power of two");
  }
  // bit-reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const cdouble wlen = std::polar(1.0, ang);
    for (size_t i = 0; i < n; i += len) {
      cdouble w{1.0, 0.0};
      for (size_t k = 0; k < len / 2; ++k) {
        const cdouble even = x[i + k];
        const cdouble odd = x[i + k + len / 2] * w;
        x[i + k] = even + odd;
        x[i + k + len / 2] = even - odd;
        w *= wlen;
      }
    }
  }
}

void delay_profile(std::span<const cdouble> q, int grid_size, double* prof) {
  const size_t G = static_cast<size_t>(grid_size);
  if (grid_size <= 0 || (G & (G - 1)) != 0 || G < q.size()) {
    throw std::invalid_argument("delay grid must be a power of two covering the sequence");
  }
  std::vector<cdouble> x(G, cdouble{0.0, 0.0});
  for (size_t m = 1; m < q.size(); ++m) x[m] = q[m];
  fft_pow2(x, +1);
  for (size_t g = 0; g < G; ++g) prof[g] = std::norm(x[g]);
}

void delay_profile_serial(std::span<const cdouble> q, int grid_size, double* prof) {
  for (int g = 0; g < grid_size; ++g) {
    const double step = 2.0 * M_PI * static_cast<double>(g) / static_cast<double>(grid_size);
    prof[g] = std::norm(profile_point_direct(q, step));
  }
}

}  // namespace isac::kernels
