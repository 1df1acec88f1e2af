#pragma once

#include <cstdint>
#include <random>

namespace rmtcov {

/// splitmix64 step; used to whiten seed material.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and up to two
/// stream indices (e.g. ratio index and trial index). Deterministic, and
/// distinct inputs give effectively independent generators.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(master ^ 0x8e9c64f40a3bf0e1ULL);
  h = splitmix64(h ^ splitmix64(a));
  h = splitmix64(h ^ splitmix64(b + 0x517cc1b727220a95ULL));
  return h;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(splitmix64(seed));
}

}  // namespace rmtcov
