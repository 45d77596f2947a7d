#ifndef EWNOISE_RNG_HPP
#define EWNOISE_RNG_HPP

#include <cmath>
#include <cstdint>

namespace ewnoise {

// splitmix64 stream: portable, bit-reproducible across platforms, cheap to
// split into independent substreams so parallel runs match serial runs.
class RandomStream {
public:
    explicit RandomStream(uint64_t seed) : state_(seed) {}

    /// Independent stream derived from (seed, a, b); stable across runs.
    RandomStream substream(uint64_t a, uint64_t b = 0) const {
        RandomStream derived(state_ ^ 0x9E3779B97F4A7C15ULL);
        derived.state_ += mix(a + 0x1ULL);
        derived.state_ += mix(b + 0x2ULL);
        derived.next_u64();
        return derived;
    }

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Standard normal via Box-Muller (no state carried between calls).
    double normal() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Unit-mean exponential draw (single-look speckle intensity).
    double exponential() {
        double u = next_double();
        while (u <= 0.0) u = next_double();
        return -std::log(u);
    }

private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    uint64_t state_;
};

} // namespace ewnoise

#endif
