#pragma once

#include <cstdint>

namespace pacstl {

// Counter-based pseudo-random source. Every value is a pure function of
// (seed, stream, draw), so sample i of a batch sees the same numbers no matter
// how many other samples were drawn before it. Streams are used for sample
// indices (and retry attempts), draws for positions within a sample.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    // SplitMix64 finalizer; full-period mixing of a 64-bit counter.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t bits(std::uint64_t stream, std::uint64_t draw) const {
        return mix(seed_ ^ mix(stream ^ mix(draw)));
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform(std::uint64_t stream, std::uint64_t draw) const {
        return static_cast<double>(bits(stream, draw) >> 11) * 0x1.0p-53;
    }

    double uniform(std::uint64_t stream, std::uint64_t draw, double lo, double hi) const {
        return lo + (hi - lo) * uniform(stream, draw);
    }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
};

// Sequential view over one stream; hands out consecutive draw indices.
class RngStream {
  public:
    RngStream(const CounterRng& rng, std::uint64_t stream) : rng_(&rng), stream_(stream) {}

    double uniform() { return rng_->uniform(stream_, draw_++); }
    double uniform(double lo, double hi) { return rng_->uniform(stream_, draw_++, lo, hi); }

  private:
    const CounterRng* rng_;
    std::uint64_t stream_;
    std::uint64_t draw_ = 0;
};

}  // namespace pacstl
