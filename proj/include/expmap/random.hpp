#pragma once

#include <cstdint>
#include <random>

namespace expmap {

using Rng = std::mt19937_64;

/// Independent stream number `index` under `root_seed`. Seeding goes through
/// std::seed_seq on the (root, index) pair, so a replicate's stream depends
/// only on its index and never on which worker ran it.
inline Rng make_stream(std::uint64_t root_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(root_seed),
                    static_cast<std::uint32_t>(root_seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace expmap
