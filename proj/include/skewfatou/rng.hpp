#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace skewfatou {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Deterministic random stream. One 64-bit root seed per run; per-module
// streams are derived by fixed string labels so adding a consumer does not
// shift anyone else's draws. Doubles are built from raw engine output, not
// std::uniform_real_distribution, so byte-identical reruns survive a
// standard-library upgrade.
class Rng {
 public:
  Rng(std::uint64_t root_seed, std::string_view label)
      : engine_(root_seed ^ fnv1a64(label)) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::complex<double> uniform_in_disk(double radius) {
    double r = radius * std::sqrt(uniform());
    double th = 6.283185307179586477 * uniform();
    return {r * std::cos(th), r * std::sin(th)};
  }

  std::complex<double> on_circle(double radius) {
    double th = 6.283185307179586477 * uniform();
    return {radius * std::cos(th), radius * std::sin(th)};
  }

  // standard normal via Box-Muller (two draws per call, no caching)
  double gauss() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586477 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace skewfatou
