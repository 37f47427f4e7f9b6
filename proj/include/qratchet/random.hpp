// random.hpp: Counter-based random draws
//
// Every draw is a pure function of (seed, stream, counter), so results do not depend on
// the order in which parallel workers consume numbers. The mixer is the SplitMix64
// finalizer applied to a keyed combination of the three words.

#pragma once

#include <cstdint>

namespace qratchet::random {

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t draw_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
    std::uint64_t h = mix64(seed + golden);
    h = mix64(h ^ (stream + golden * 2));
    return mix64(h ^ (counter + golden * 3));
}

// Uniform double in [0, 1) with 53 random bits.
constexpr double draw_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(draw_bits(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift; the bias is below
// 2^-64 * bound, irrelevant for the pool sizes used here.
inline std::uint64_t draw_below(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter, std::uint64_t bound) {
    const unsigned __int128 wide = static_cast<unsigned __int128>(draw_bits(seed, stream, counter)) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
}

}  // namespace qratchet::random
