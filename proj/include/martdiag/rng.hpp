#pragma once

#include <cstdint>
#include <random>

namespace martdiag {

// splitmix64 finalizer (Steele, Lea & Flood). Used as the documented
// seed-splitting rule: per-series seeds are derived from the master seed so
// series j can be generated independently on any thread and still match a
// sequential run bit for bit.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for the j-th stream under a given master seed.
inline std::uint64_t split_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(master_seed ^ splitmix64(index + 1));
}

using Rng = std::mt19937_64;

}  // namespace martdiag
