#pragma once

#include <cstdint>
#include <span>

namespace epictrl {

/// SplitMix64 (Steele, Lea, Flood 2014). Chosen over std::mt19937 for the
/// shuffles and Monte-Carlo streams because its output is fully specified by
/// integer arithmetic, so results reproduce bit-for-bit on any platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t state_;
};

/// Independent stream for (seed, index) pairs; used to give every
/// Monte-Carlo run its own generator.
inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed ^ (0x632be59bd9b4e019ULL * (index + 1)));
    return SplitMix64(mixer.next());
}

template <typename T>
void fisher_yates(std::span<T> items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace epictrl
