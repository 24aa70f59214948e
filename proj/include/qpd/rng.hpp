#pragma once

#include <cstdint>
#include <random>

namespace qpd {

// Fixed default seed so repeated runs emit byte-identical artifacts.
inline constexpr std::uint64_t kDefaultSeed = 123456789u;

// Uniform double in [0,1) from the top 53 bits of one engine draw.
// mt19937_64 output is pinned by the standard, so the stream is
// reproducible across platforms and standard libraries.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// splitmix64 finalizer; derives independent block sub-seeds from a
// master seed so partial sums never depend on scheduling.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace qpd
