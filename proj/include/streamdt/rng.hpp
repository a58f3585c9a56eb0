#pragma once

#include <cstdint>

namespace streamdt {

// Seed scrambler (Steele et al. splitmix64). Used to initialize stream
// generators and to derive independent sub-seeds from one run seed, so a
// single integer reproduces a whole experiment.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// xorshift64* generator (Vigna 2016): shifts 12/25/27, multiplier
// 0x2545F4914F6CDD1D. Small, fast, and easy to reproduce in any language.
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed) {
        SplitMix64 mix{seed};
        state_ = mix.next();
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;  // state must stay nonzero
    }

    std::uint64_t next_u64() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1DULL;
    }

    // Uniform double in [0, 1) with 53 random mantissa bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Plain modulo reduction, chosen for
    // cross-language reproducibility; the bias is < n / 2^64.
    std::uint64_t next_below(std::uint64_t n) {
        return next_u64() % n;
    }

private:
    std::uint64_t state_;
};

// Deterministic sub-seed: one run seed fans out to concept, instance and
// shuffle seeds via distinct salts.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    SplitMix64 mix{base + 0x9E3779B97F4A7C15ULL * (salt + 1)};
    return mix.next();
}

}  // namespace streamdt
