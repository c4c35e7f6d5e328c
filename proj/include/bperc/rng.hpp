#pragma once

// Seeded random numbers with platform-independent output: mt19937_64 for
// bits, explicit uniform/normal construction on top (the standard library
// distributions are free to differ between implementations).

#include <cmath>
#include <cstdint>
#include <random>

namespace bperc {

// SplitMix64 finalizer; decorrelates nearby seeds.
inline std::uint64_t mix_u64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-trial sub-seed: counter scheme sub_seed(seed, i) = mix(seed, i), so
// trials are order-independent.
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_u64(seed ^ mix_u64(stream + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (cosine branch only).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]: keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace bperc
