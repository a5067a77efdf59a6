#pragma once

#include <cstdint>

namespace nldiff {

/// Counter-style generator: the state advances by a fixed increment and
/// each output is a finalizer of the state alone, so a stream is fully
/// determined by its starting state.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1) with 53 random bits
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// Independent stream for one unit of work: the starting state is a hash
/// of (seed, index), so results do not depend on how work is scheduled.
inline SplitMix64 make_stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer{seed ^ (0x9E3779B97F4A7C15ull * (index + 0x632BE59BD9B4E019ull))};
    const std::uint64_t a = mixer.next();
    const std::uint64_t b = mixer.next();
    return SplitMix64{a ^ (b << 1)};
}

}  // namespace nldiff
