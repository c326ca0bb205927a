#pragma once

#include <cmath>
#include <cstdint>

namespace fairpo {

// splitmix64 step; used both as a PRNG stage and as a seed mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child seed from a master seed and an index path. Parallel work
// units (grid cells, stages, arms, chains) each get mix(master, idx...) so
// results are independent of execution schedule.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t k) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (k + 1));
  return splitmix64(s);
}
template <typename... Ks>
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t k, Ks... rest) {
  return mix_seed(mix_seed(master, k), rest...);
}

// xoshiro256** — fixed, documented generator so cohorts are byte-identical
// across reruns of the same binary.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (inverse pair member discarded).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace fairpo
