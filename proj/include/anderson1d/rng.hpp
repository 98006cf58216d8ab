#pragma once

#include <cstdint>

namespace anderson {

// Counter-based generation: the variate at a lattice site is a pure function
// of (seed, realization, site), so extending a window or splitting work across
// realizations never changes previously produced values.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t realization,
                                  std::int64_t site, std::uint64_t stream = 0) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (realization * 0xbf58476d1ce4e5b9ull));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(site) * 0x94d049bb133111ebull));
    if (stream != 0) h = splitmix64(h ^ (stream * 0x9e3779b97f4a7c15ull));
    return h;
}

// Uniform in [0, 1) with 53 random bits.
inline double counter_uniform(std::uint64_t seed, std::uint64_t realization,
                              std::int64_t site, std::uint64_t stream = 0) {
    return static_cast<double>(counter_hash(seed, realization, site, stream) >> 11) *
           0x1.0p-53;
}

}  // namespace anderson
