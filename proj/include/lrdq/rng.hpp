#pragma once

#include <cstdint>
#include <random>

namespace lrdq {

// splitmix64 finalizer, used to derive independent per-replication streams
// from (seed, index). Results are independent of execution order.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = mix64(seed ^ mix64(index + 0x632be59bd9b4e019ULL));
  return std::mt19937_64(s);
}

}  // namespace lrdq
