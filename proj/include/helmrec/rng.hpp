#pragma once

#include <cstdint>

namespace helmrec {

/// splitmix64: the 64-bit shift-based generator used for all noise draws.
/// Constants are the standard ones (Steele, Lea, Flood 2014); the stream is
/// fully determined by the seed, so artifacts are bit-reproducible across
/// platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 mantissa bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [-1, 1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

private:
    std::uint64_t state_;
};

}  // namespace helmrec
