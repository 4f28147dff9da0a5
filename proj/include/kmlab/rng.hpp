#pragma once

#include <cstdint>

namespace kmlab {

/// Counter-based 64-bit generator (splitmix64). The i-th output of a stream
/// seeded with s is a pure function of (s, i), so identical seeds reproduce
/// identical streams across platforms and reruns. The exact mixing constants
/// are part of the file-format contract (see README) so ports can match
/// streams bit for bit.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n) via the 128-bit multiply-shift reduction.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

/// Finalizer of splitmix64, used standalone as a 64-bit hash.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of the per-task substream: substream(master, id) is independent of
/// task scheduling, so experiment cells can run in any order or in parallel
/// and still draw identical randomness.
inline std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t task_id) {
    return mix64(master_seed ^ mix64(task_id + 0x9E3779B97F4A7C15ULL));
}

} // namespace kmlab
