// SPDX-License-Identifier: Apache-2.0
//
// Seed derivation for reproducible Monte-Carlo streams. Each path gets an
// engine keyed by (master seed, path id, purpose tag) through SplitMix64, so
// ensembles can be re-partitioned or merged without changing any stream.

#pragma once

#include <cstdint>
#include <random>

namespace sgns {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t path_id,
                                    std::uint64_t purpose = 0) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ (0xA24BAED4963EE407ull + path_id));
    s = splitmix64(s ^ (0x9FB21C651E98DF25ull + purpose));
    return s;
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t path_id,
                                   std::uint64_t purpose = 0) {
    return std::mt19937_64(derive_seed(master, path_id, purpose));
}

} // namespace sgns
