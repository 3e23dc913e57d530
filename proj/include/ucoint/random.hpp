#pragma once

#include <cstdint>
#include <random>

namespace ucoint {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of replication `index` under `master`; independent of execution order.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

}  // namespace ucoint
