#ifndef ISOLAB_RNG_HPP
#define ISOLAB_RNG_HPP

#include <cstdint>
#include <random>

namespace isolab {

// SplitMix64 step; used both as a generator finalizer and as the
// documented seed-splitting rule for parallel work items.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Sub-seed for work item `index` of a run seeded with `seed`.
// Every parallel loop derives its per-item generator this way, so results
// are independent of the scheduling order and thread count.
inline std::uint64_t subseed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 1));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(subseed(seed, index));
}

} // namespace isolab

#endif
