#pragma once

#include <cstdint>

namespace lw {

// splitmix64: tiny, seedable, and good enough for tie-breaks and sampling.
// Streams for independent work items are derived by perturbing the master
// seed with a golden-ratio multiple of the item index, so (seed, index)
// always reproduces the same draw sequence.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0,1) with 53 random bits.
    double next_double() { return double(next() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer in [0,n) via bitmask rejection.
    std::uint32_t next_below(std::uint32_t n) {
        if (n <= 1) return 0;
        std::uint32_t mask = n - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        for (;;) {
            std::uint32_t v = std::uint32_t(next() >> 32) & mask;
            if (v < n) return v;
        }
    }

    static SplitMix64 stream(std::uint64_t master, std::uint64_t item) {
        SplitMix64 g(master + (item + 1) * 0x9e3779b97f4a7c15ULL);
        return SplitMix64(g.next());
    }

    std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
};

}  // namespace lw
