#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace adl {

// SplitMix64: a counter-based generator. The state is a 64-bit counter advanced by
// the golden-ratio increment; each output is a bijective avalanche hash of the counter.
// Seeding sets the counter directly, so replicate r of a run seeded with s uses s ^ r.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : counter_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        std::uint64_t z = (counter_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on (0, 1], never zero so that log() stays finite.
    double uniform_open() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }
    // Uniform on [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double exponential(double rate) { return -std::log(uniform_open()) / rate; }

private:
    std::uint64_t counter_;
};

inline std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate) {
    return seed ^ replicate;
}

}  // namespace adl
