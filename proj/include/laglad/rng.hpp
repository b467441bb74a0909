#pragma once

// Reproducible random streams.
//
// Stream i of master seed s is seeded with splitmix64(s + (i + 1) * golden),
// golden = 0x9E3779B97F4A7C15. The map i -> s + (i + 1) * golden is injective
// modulo 2^64 (golden is odd) and the splitmix64 finalizer is a bijection, so
// distinct streams never share an engine seed. Each stream drives its own
// std::mt19937_64.

#include <cstdint>
#include <random>

namespace laglad {

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  SeedSpec sub(std::uint64_t k) const noexcept { return {master_seed, stream_index * 4 + k}; }
  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

inline std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_seed(const SeedSpec& s) noexcept {
  return splitmix64(s.master_seed + (s.stream_index + 1) * 0x9E3779B97F4A7C15ULL);
}

using Engine = std::mt19937_64;

inline Engine make_engine(const SeedSpec& s) { return Engine(stream_seed(s)); }

}  // namespace laglad
