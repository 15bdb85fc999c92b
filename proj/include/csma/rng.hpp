// rng.hpp — counter-based random streams, one per (seed, site, clock) tuple
#pragma once

#include <cmath>
#include <cstdint>

namespace csma {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

// SplitMix64 stream keyed by an arbitrary tuple of integers. Streams with
// different keys are independent for simulation purposes, and a stream's
// output depends only on its key and draw index — never on scheduling —
// which is what makes replicated runs bit-reproducible.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key = 0) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return detail::mix64(state_);
    }

    // uniform in (0, 1); never returns 0, so -log is always finite
    double next_uniform() {
        return double(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    double next_exponential() { return -std::log(next_uniform()); }

private:
    std::uint64_t state_;
};

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
    return detail::mix64(a + 0x9E3779B97F4A7C15ULL * (b + 1));
}
inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_key(mix_key(a, b), c);
}

// replicate seed derivation used by the harness; stable across platforms
inline std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t index) {
    return mix_key(base_seed, index, 0x5EEDu);
}

} // namespace csma
