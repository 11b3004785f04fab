#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cryptotail {

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based seed derivation: seed_j = mix64(master + (j + 1) * golden).
/// For a fixed master seed distinct j give distinct seeds, and a seed depends
/// only on (master, j), never on the order in which streams are created.
struct SeedPolicy {
    std::uint64_t master_seed = 0;

    constexpr std::uint64_t derive(std::uint64_t j) const {
        return mix64(master_seed + (j + 1) * 0x9e3779b97f4a7c15ULL);
    }
    /// Child policy for a sub-task, e.g. one sweep cell.
    constexpr SeedPolicy child(std::uint64_t key) const { return {derive(key ^ 0x5bd1e995ULL << 32)}; }
};

using Rng = std::mt19937_64;

/// Uniform on (0, 1] from the top 53 bits of one draw.
inline double uniform_open0(Rng& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (both uniforms from uniform_open0), so the
/// stream is identical across standard libraries.
inline double standard_normal(Rng& rng) {
    const double u1 = uniform_open0(rng);
    const double u2 = uniform_open0(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace cryptotail
