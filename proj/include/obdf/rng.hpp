#pragma once

#include <cstdint>

namespace obdf {

// Counter-based RNG: a stateless splitmix64-style mix of (seed, counters).
// Any (seed, a, b, c) tuple maps to one fixed value, so parallel consumers
// never share state and results are independent of thread count.
inline std::uint64_t rng_mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t rng_u64(std::uint64_t seed, std::uint64_t a = 0,
                             std::uint64_t b = 0, std::uint64_t c = 0) {
  return rng_mix(rng_mix(rng_mix(rng_mix(seed) + a) + b) + c);
}

// Uniform in [0, 1).
inline double rng_uniform(std::uint64_t seed, std::uint64_t a = 0,
                          std::uint64_t b = 0, std::uint64_t c = 0) {
  return static_cast<double>(rng_u64(seed, a, b, c) >> 11) * 0x1.0p-53;
}

}  // namespace obdf
