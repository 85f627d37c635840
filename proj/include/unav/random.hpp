#pragma once

// Portable draws on top of std::mt19937_64. The <random> distributions are
// implementation-defined, so anything that must be byte-reproducible across
// standard libraries goes through these helpers instead.

#include <cstdint>
#include <random>

namespace unav {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = n == 0 ? 0 : (~std::uint64_t{0} - n + 1) % n;
  std::uint64_t r = rng();
  while (r < limit) r = rng();
  return n == 0 ? 0 : r % n;
}

}  // namespace unav
