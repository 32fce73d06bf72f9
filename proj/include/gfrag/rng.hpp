#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace gfrag {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Every stream is identified by a 64-bit key; the 128-bit counter walks
// through the stream, so independent streams never share state.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t key = 0, std::uint64_t counter_hi = 0) noexcept
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
          counter_{0, 0, static_cast<std::uint32_t>(counter_hi),
                   static_cast<std::uint32_t>(counter_hi >> 32)} {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (index_ == 4) {
            buffer_ = bijection(counter_, key_);
            increment();
            index_ = 0;
        }
        return buffer_[index_++];
    }

    static Block bijection(Block counter, std::array<std::uint32_t, 2> key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * counter[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * counter[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
        }
        return counter;
    }

private:
    void increment() noexcept {
        for (auto& word : counter_) {
            if (++word != 0) break;
        }
    }

    std::array<std::uint32_t, 2> key_;
    Block counter_;
    Block buffer_{};
    int index_ = 4;
};

// SplitMix64 finaliser; used to turn (seed, stream, index) into Philox keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Key for the `index`-th draw sequence of logical stream `stream` under
// master seed `seed`. Rule: mix64(mix64(seed ^ mix64(stream)) + index).
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t index) noexcept {
    return mix64(mix64(seed ^ mix64(stream)) + index);
}

// Named logical streams so that different experiments never reuse keys.
enum class Stream : std::uint64_t {
    LevyPaths = 1,
    CellTrees = 2,
    SpineMinusTrees = 3,
    SpinePlusTrees = 4,
    FirstPassage = 5,
    Resampling = 6,
    InnerAreas = 7,
    PairedAreas = 8,
    Auxiliary = 9,
    TiltedTrees = 10,
    CanonicalTrees = 11,
};

// Random source with the handful of variates the simulators need.
// Distributions are implemented here (not via <random>) so that output is
// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t key) noexcept : engine_(key) {}
    Rng(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept
        : engine_(stream_key(seed, static_cast<std::uint64_t>(stream), index)) {}

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept {
        const std::uint64_t hi = engine_();
        const std::uint64_t lo = engine_();
        const std::uint64_t bits = ((hi << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    double exponential() noexcept { return -std::log(uniform()); }

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * M_PI * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    // Raw 64 bits, e.g. to key an independent child generator.
    std::uint64_t bits64() noexcept {
        const std::uint64_t hi = engine_();
        return (hi << 32) | engine_();
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    Philox4x32 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gfrag
