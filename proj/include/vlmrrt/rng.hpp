#pragma once

#include <cstdint>
#include <random>

namespace vlmrrt {

/// Seeded uniform random source. All randomness in the library flows through
/// this wrapper so that results are reproducible bit-for-bit across platforms:
/// mt19937_64 output is standardized, the double conversion below is fixed,
/// and no std::*_distribution (whose output is implementation-defined) is used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform index in [0, n). n must be positive.
    std::size_t index(std::size_t n) {
        auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

private:
    std::mt19937_64 gen_;
};

/// splitmix64 finalizer; mixes a stream id into a master seed so that
/// sub-generators (per trial, per planner stream) are statistically
/// independent yet fully determined by (master, stream).
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace vlmrrt
