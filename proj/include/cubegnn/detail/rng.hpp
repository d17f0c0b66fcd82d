#pragma once

// Seeded, platform-independent random helpers. std::uniform_*_distribution
// is implementation-defined, so all sampling goes through these.

#include <cstdint>

#include "cubegnn/cube.hpp"

namespace cubegnn::detail {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64_final(state_);
    }

    // Unbiased integer in [0, n) via rejection.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t mix64_final(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

// Independent stream for sub-task `index` of a master seed.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index + 1));
}

inline Move random_move(SplitMix64& rng) {
    return Move(static_cast<int>(rng.next_below(kNumMoves)));
}

}  // namespace cubegnn::detail
