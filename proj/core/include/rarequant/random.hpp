#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>

namespace rarequant {

// SplitMix64 finalizer. Used for seeding and as the fixed index mixer for
// ensemble member seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream constants XOR-ed into a caller seed so that different operations
// fed the same seed never consume the same sequence.
namespace stream {
inline constexpr std::uint64_t kSplit = 0x5b1d0c3a9e2f4471ULL;
inline constexpr std::uint64_t kBootstrap = 0xa3c59ac2f1e8d603ULL;
inline constexpr std::uint64_t kSynthTrain = 0x7f4a7c159e3779b9ULL;
inline constexpr std::uint64_t kSynthTarget = 0x2545f4914f6cdd1dULL;
inline constexpr std::uint64_t kSingleModel = 0xd6e8feb86659fd93ULL;
}  // namespace stream

// xoshiro256** 1.0 (Blackman & Vigna). All draws below are implemented
// here rather than through <random> distributions, whose output is
// implementation-defined; corpora and splits must be identical across
// standard libraries.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept {
        std::uint64_t s = seed;
        for (auto& word : state_) {
            word = mix64(s);
            s += 0x9e3779b97f4a7c15ULL;
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1); safe to take the logarithm of.
    double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform integer on [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = (*this)();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    // Poisson by counting unit-rate exponential arrivals inside [0, mean].
    // O(mean) per draw, which matches the cost of emitting that many tokens.
    std::uint64_t poisson(double mean) noexcept {
        std::uint64_t k = 0;
        double t = -std::log(uniform_open());
        while (t <= mean) {
            ++k;
            t -= std::log(uniform_open());
        }
        return k;
    }

    template <typename T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace rarequant
