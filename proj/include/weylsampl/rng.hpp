// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace weylsampl {

/// Counter-based 64-bit generator: the i-th output is a fixed avalanche mix of
/// seed + i * golden_gamma (the splitmix64 finalizer). Stateless apart from the
/// counter, so streams are reproducible across platforms and schedulers, and
/// a stream can be split by offsetting the counter.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t counter_start = 0)
        : seed_(seed), counter_(counter_start) {}

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next_u64() {
        ++counter_;
        return mix64(seed_ + 0x9E3779B97F4A7C15ULL * counter_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n). Modulo bias is < n / 2^64, irrelevant at our scales.
    std::uint64_t uniform_below(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller (two uniforms per draw, no cached spare).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        // u1 = 0 would take log(0); shift into (0, 1].
        double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

} // namespace weylsampl
