#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lppl::rng {

/// All randomness in the library flows through std::mt19937_64, whose output
/// sequence is fixed by the C++ standard, seeded explicitly at each use site.
/// Distribution mapping is done by hand below because the standard does not
/// pin down std::uniform_real_distribution / std::normal_distribution output.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

/// Stream seed for one window fit, derived from the global seed and the window
/// identity. Independent of evaluation order, so parallel and serial ensemble
/// runs see identical streams.
inline std::uint64_t derive_seed(std::uint64_t global_seed, double t1, double t2) {
    return mix(mix(global_seed, std::bit_cast<std::uint64_t>(t1)),
               std::bit_cast<std::uint64_t>(t2));
}

/// Uniform draw in [0, 1) with 53-bit resolution.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

/// Standard normal via Box-Muller. Two draws per call; the sine branch is
/// discarded to keep call sites stateless.
inline double normal(Engine& eng) {
    double u1 = uniform01(eng);
    while (u1 <= 0.0)
        u1 = uniform01(eng);
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace lppl::rng
