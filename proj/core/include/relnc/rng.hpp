#pragma once

#include <cstdint>
#include <random>

namespace relnc {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

// Counter-based stream split: independent, reproducible substreams for
// parallel sweep points and SA restarts.
inline std::mt19937_64 substream(std::uint64_t master_seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x51ed2701ull)));
}

}  // namespace relnc
