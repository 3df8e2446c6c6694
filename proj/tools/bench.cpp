// Microbenchmark: OpenMP kernels against their serial references.
#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "isac/harness.hpp"
#include "isac/kernels.hpp"
#include "isac/rng.hpp"

using namespace isac;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-24s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
  const int reps = 5;

  Scenario sc = default_scenario(7);
  const int M = 4096;
  const int Nr = sc.config.num_rx_antennas;
  {
    std::vector<cdouble> h(static_cast<size_t>(M) * Nr);
    std::vector<double> gains(static_cast<size_t>(M));
    const double s = time_ms(
        [&] {
          kernels::synth_channel_serial(M, Nr, sc.config.subcarrier_spacing_hz, sc.paths.paths,
                                        h.data(), gains.data());
        },
        reps);
    const double p = time_ms(
        [&] {
          kernels::synth_channel(M, Nr, sc.config.subcarrier_spacing_hz, sc.paths.paths,
                                 h.data(), gains.data());
        },
        reps);
    report("synth_channel", s, p);
  }
  {
    const int G = 8192;
    Rng rng(11);
    std::vector<cdouble> z(static_cast<size_t>(Nr));
    for (auto& v : z) v = rng.complex_gaussian(1.0);
    std::vector<double> grid(static_cast<size_t>(G));
    for (int g = 0; g < G; ++g) grid[static_cast<size_t>(g)] = -1.0 + (g + 0.5) * 2.0 / G;
    std::vector<double> out(static_cast<size_t>(G));
    const double s =
        time_ms([&] { kernels::spatial_spectrum_serial(z, grid, out.data()); }, reps);
    const double p = time_ms([&] { kernels::spatial_spectrum(z, grid, out.data()); }, reps);
    report("spatial_spectrum", s, p);
  }
  {
    const int Msub = 1024;
    const int G = 8192;
    Rng rng(13);
    std::vector<cdouble> q(static_cast<size_t>(Msub) + 1, cdouble{0, 0});
    for (size_t m = 1; m < q.size(); m += 2) q[m] = rng.complex_gaussian(1.0);
    std::vector<double> prof(static_cast<size_t>(G));
    const double s =
        time_ms([&] { kernels::delay_profile_serial(q, G, prof.data()); }, reps);
    const double p = time_ms([&] { kernels::delay_profile(q, G, prof.data()); }, reps);
    report("delay_profile (fft)", s, p);
  }
  {
    SweepSpec spec;
    spec.values = {10.0};
    spec.methods = {Method::Rsaupa};
    spec.trials = 8;
    spec.optimizer.max_iterations = 50;
    SweepSpec one = spec;
    one.num_threads = 1;
    const double s = time_ms([&] { run_sweep(one, sc); }, 2);
    SweepSpec many = spec;
#ifdef _OPENMP
    many.num_threads = omp_get_num_procs();
#endif
    const double p = time_ms([&] { run_sweep(many, sc); }, 2);
    report("monte_carlo trials", s, p);
  }
  return 0;
}
