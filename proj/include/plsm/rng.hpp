#pragma once

#include <cstdint>
#include <random>

#include "plsm/point.hpp"

namespace plsm {

/// Seedable, portable random generator. The engine is std::mt19937_64 (fully
/// specified by the standard) and uniform doubles are produced from the raw
/// 64-bit output directly, so streams are bit-identical across platforms.
///
/// Stream splitting: substreams are derived from the *root* seed with a
/// splitmix64 hash of (purpose, index). The acquisition loop uses one
/// substream per acquisition index (purpose = kPlacement), noise injection
/// uses purpose = kNoise; substreams never depend on draw order.
class Rng {
public:
    static constexpr std::uint64_t kPlacement = 0x706c6163656d656eULL;  // "placemen"
    static constexpr std::uint64_t kNoise = 0x6e6f697365000000ULL;      // "noise"

    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)) {}

    Rng stream(std::uint64_t purpose, std::uint64_t index) const {
        std::uint64_t h = splitmix64(seed_ + 0x9e3779b97f4a7c15ULL * (purpose ^ splitmix64(index)));
        return Rng(h, Tag{});
    }

    /// Uniform double in [0, 1), 53 significant bits.
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Complex with real and imaginary parts i.i.d. uniform on [-1, 1].
    Complex box_complex() {
        const double re = uniform(-1.0, 1.0);
        const double im = uniform(-1.0, 1.0);
        return {re, im};
    }

    static std::uint64_t splitmix64(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    struct Tag {};
    Rng(std::uint64_t derived, Tag) : seed_(derived), engine_(derived) {}

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace plsm
