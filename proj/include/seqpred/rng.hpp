#pragma once

#include <cstdint>

namespace seqpred {

// SplitMix64: the artifact's named, seedable, splittable generator.
// Every stochastic operation takes an explicit seed; independent streams are
// derived with for_stream(seed, i), so any partition of work items across
// workers reproduces the same draws.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static SplitMix64 for_stream(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 g(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
        g.next_u64(); // decorrelate nearby streams
        return g;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

} // namespace seqpred
