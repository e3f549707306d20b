// rng.hpp
// Counter-based splittable random number generator.
//
// Every stream is identified by a 64-bit key; the i-th output is a hash of
// (key, i). Forking a child stream derives a new key from the parent key and
// a stream id, independent of how many numbers the parent has produced, so
// per-cell sampling is reproducible regardless of evaluation order.

#pragma once

#include <cmath>
#include <cstdint>

namespace nogo {

class StreamRng {
public:
    using result_type = std::uint64_t;

    explicit StreamRng(std::uint64_t key) : key_(mix(key)) {}

    // SplitMix64 finalizer.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(key_ + counter_++ * 0x9e3779b97f4a7c15ULL); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Child stream keyed by (parent key, id); unaffected by this stream's counter.
    StreamRng split(std::uint64_t id) const {
        StreamRng child(0);
        child.key_ = mix(key_ ^ mix(id + 0x632be59bd9b4e019ULL));
        return child;
    }

    // Derived seed for handing to components that take a seed, not a stream.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t id) {
        return mix(mix(seed) ^ mix(id + 0x9536afc5397fe9a3ULL));
    }

    // Standard normal via Box-Muller; two uniforms per draw.
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // UniformRandomBitGenerator interface, for <random> distributions.
    std::uint64_t operator()() { return next_u64(); }
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~0ULL; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 1;
};

}  // namespace nogo
