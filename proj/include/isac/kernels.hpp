// Hot-loop kernels, each with an OpenMP-parallel entry point and a plain
// serial reference. The parallel versions keep per-element arithmetic in the
// same order as the serial ones (threads only split independent output
// elements), so both produce bit-identical results; tests assert exactly
// that, and the bench target compares their throughput.
#pragma once

#include <span>

#include "isac/types.hpp"

namespace isac::kernels {

// Frequency response of a multipath channel:
//   h[m][n] = sum_p b_p exp(-j 2 pi (m+1) df tau_p) exp(-j pi n cos psi_p)
// (m is the 0-based storage index; formulas use 1-based subcarriers).
// Also fills gains[m] = ||h[m]||^2. h has M*Nr entries, row-major.
void synth_channel(int M, int Nr, double spacing_hz, std::span<const Path> paths,
                   cdouble* h, double* gains);
void synth_channel_serial(int M, int Nr, double spacing_hz, std::span<const Path> paths,
                          cdouble* h, double* gains);

// z[n] = sum over subcarriers with mask!=0 of y[m][n]. y is M x Nr row-major.
void masked_antenna_sum(int M, int Nr, const cdouble* y, std::span<const double> mask,
                        cdouble* z);

// Spatial matched-filter spectrum of a summed snapshot z (length Nr):
//   out[g] = | sum_n exp(+j pi n cos_grid[g]) z[n] | / sqrt(Nr)
void spatial_spectrum(std::span<const cdouble> z, std::span<const double> cos_grid,
                      double* out);
void spatial_spectrum_serial(std::span<const cdouble> z, std::span<const double> cos_grid,
                             double* out);

// In-place radix-2 complex FFT; n must be a power of two. sign = -1 gives the
// forward DFT sum x[k] e^{-j 2 pi k g / n}, sign = +1 the conjugate transform
// (no 1/n scaling).
void fft_pow2(std::span<cdouble> x, int sign);

// Delay scan profile: prof[g] = | sum_m q[m] e^{+j 2 pi m g / G} |^2 for
// g = 0..G-1, with q indexed by 1-based subcarrier (q[0] unused, size M+1).
// G must be a power of two strictly greater than M. The FFT version and the
// direct serial version agree to rounding.
void delay_profile(std::span<const cdouble> q, int grid_size, double* prof);
void delay_profile_serial(std::span<const cdouble> q, int grid_size, double* prof);

}  // namespace isac::kernels
