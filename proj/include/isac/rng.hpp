// Deterministic random number generation.
//
// Every stochastic site derives its own seed from (master seed, stream ids)
// via splitmix64 so results are independent of thread count and evaluation
// order. Gaussian draws use an explicit Box-Muller transform because the
// stdlib normal_distribution is implementation-defined and would break
// byte-for-byte reproducibility of CSV outputs across toolchains.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "isac/types.hpp"

namespace isac {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  uint64_t s = splitmix64(master ^ 0x6a09e667f3bcc909ULL);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return splitmix64(s ^ c);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return std::ldexp(static_cast<double>(engine_() >> 11), -53);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // CN(0, var): real and imaginary parts iid N(0, var/2).
  cdouble complex_gaussian(double var = 1.0) {
    const double s = std::sqrt(var / 2.0);
    const double re = s * gaussian();
    const double im = s * gaussian();
    return {re, im};
  }

  uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace isac
