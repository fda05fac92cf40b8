#pragma once

#include <cstdint>
#include <limits>

namespace eabf {

/// SplitMix64 (Steele, Lea, Flood 2014). Eight bytes of state, so every
/// simulated device can own an independent stream; satisfies
/// UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix(state_ += kGamma); }

    /// The SplitMix64 output finalizer, usable as a 64-bit hash.
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

private:
    std::uint64_t state_;
};

/// Seed of child stream `index` of `parent`; distinct indices give
/// statistically independent streams.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return SplitMix64::mix(SplitMix64::mix(parent) ^ SplitMix64::mix(index + SplitMix64::kGamma));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(SplitMix64& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Largest multiple of bound representable in 64 bits (exclusive limit).
constexpr std::uint64_t max_multiple_below(std::uint64_t bound) noexcept {
    return std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
}

/// Uniform integer in [0, bound) by rejection; bound must be positive.
inline std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t bound) noexcept {
    const std::uint64_t limit = max_multiple_below(bound);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

}  // namespace eabf
