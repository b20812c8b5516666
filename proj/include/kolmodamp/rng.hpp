#pragma once

#include <cstdint>

namespace kolmodamp {

/* Counter-based splitmix64. Used for lattice signs, profile phases and
   random initial data so that outputs are bit-reproducible across
   platforms and independent of evaluation order (std::uniform_*
   distributions are not portable across standard libraries). */

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
    return splitmix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

// Deterministic +/-1 sign.
inline double hash_sign(std::uint64_t h) { return (h & 1ULL) ? 1.0 : -1.0; }

} // namespace kolmodamp
