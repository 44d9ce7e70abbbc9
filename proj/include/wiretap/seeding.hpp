#pragma once

// Seed derivation for reproducible, independently parallelizable trials.

#include <cstdint>
#include <random>

namespace wiretap::seeding {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// hash(master seed, grid index, trial index); distinct inputs give
// independent-looking streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t grid,
                                 std::uint64_t trial) {
  std::uint64_t h = splitmix64(master ^ 0xa0761d6478bd642fULL);
  h = splitmix64(h ^ grid);
  h = splitmix64(h ^ trial);
  return h;
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t grid,
                                std::uint64_t trial) {
  return std::mt19937_64(derive_seed(master, grid, trial));
}

}  // namespace wiretap::seeding
