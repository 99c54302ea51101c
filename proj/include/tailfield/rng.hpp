#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "tailfield/normal.hpp"

// Seeded, splittable random streams. One independent stream per trajectory
// (or replication) makes parallel generation order-independent: the draw
// sequence within a stream depends only on (seed, stream id), never on the
// scheduler. Variates are produced by inverse-CDF so the bit pattern is
// identical across platforms and compilers.

namespace tailfield {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256++ (Blackman & Vigna), state seeded through splitmix64.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1); never returns an endpoint.
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() { return norm_quantile(uniform()); }

  double exponential() { return -std::log(uniform()); }

  // Standard Pareto: P(Y <= y) = 1 - 1/y for y >= 1.
  double pareto() { return 1.0 / uniform(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

// Independent stream for a given (seed, stream id) pair.
inline RandomStream make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t sm = seed;
  const std::uint64_t a = splitmix64(sm);
  sm = stream_id ^ 0xD1B54A32D192ED03ULL;
  const std::uint64_t b = splitmix64(sm);
  return RandomStream(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
}

}  // namespace tailfield
