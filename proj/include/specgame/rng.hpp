#pragma once
#include <cstdint>
#include <random>

namespace specgame {

// All randomness in the project flows through this wrapper. mt19937_64 raw
// output is fully specified by the standard; the helpers below replace the
// library distributions (whose algorithms are implementation-defined) so a
// given seed yields the same draws on any conforming toolchain.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Unbiased uniform integer in [0, n), n >= 1. Rejection sampling on the
    // top of the range; accepts on the first draw with overwhelming odds.
    uint64_t below(uint64_t n) {
        const uint64_t threshold = (0 - n) % n;
        for (;;) {
            const uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in (0, 1]; safe base for inverse-CDF transforms that
    // blow up at 0.
    double uniform01_open0() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

private:
    std::mt19937_64 gen_;
};

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed derivation for trial k of a batch (and bootstrap replicate k of a
// goodness-of-fit run). Recorded in every run manifest.
inline uint64_t mix_seed(uint64_t base_seed, uint64_t k) {
    return splitmix64(base_seed ^ (0x9E3779B97F4A7C15ULL * (k + 1)));
}

inline constexpr const char* kPrngName = "mt19937_64";
inline constexpr const char* kSeedMixName = "splitmix64(seed ^ 0x9E3779B97F4A7C15*(k+1))";

} // namespace specgame
