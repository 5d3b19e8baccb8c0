#pragma once

#include <cstdint>
#include <limits>

namespace fadingsched {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a child seed from a master seed and two counters.
///
/// Used everywhere a stream must be addressable by position: per-trial seeds
/// keyed by (master, n, trial) and per-link seeds keyed by (seed, src, dst).
/// Adding new keys never perturbs the streams of existing keys.
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (a + 0x632be59bd9b4e019ULL));
    h = mix64(h ^ (b + 0x85157af5d2e7a3c1ULL));
    return h;
}

/// Small, copyable 64-bit generator (SplitMix64 stream).
///
/// Satisfies UniformRandomBitGenerator so it can also drive <random>
/// algorithms, but the distribution catalog only consumes `uniform01()` so
/// that draws are bit-identical across standard library implementations.
class RandomSource {
public:
    using result_type = std::uint64_t;

    explicit RandomSource(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open_low() noexcept { return 1.0 - uniform01(); }

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

}  // namespace fadingsched
