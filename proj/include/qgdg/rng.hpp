#pragma once

#include <cstdint>

namespace qgdg {

/// Counter-based generator: word n (1-based) of stream `key` is
/// mix(mix(key ^ 0x6a09e667f3bcc909) + n * 0x9e3779b97f4a7c15).
///
/// The mixing function is the SplitMix64 finalizer (Steele, Lea, Flood 2014), so a
/// (key, counter) pair yields the same 64-bit word on every platform. Trials use
/// key = base_seed + trial_index.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key), base_(mix(key ^ 0x6a09e667f3bcc909ULL)) {}

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() {
        ++counter_;
        return mix(base_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    [[nodiscard]] std::uint64_t key() const { return key_; }
    [[nodiscard]] std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

}  // namespace qgdg
