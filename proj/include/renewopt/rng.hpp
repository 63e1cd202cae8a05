#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace renewopt {

// SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
// generators", OOPSLA 2014). One 64-bit word of state; each draw advances the
// state by a fixed odd increment and passes it through a finalizer. Used here
// because sample paths need independent, scheduling-free substreams: stream i
// of a base seed starts at mix(seed + gamma * (i + 1)), so a path's draws
// depend only on (seed, path index).
//
// All model-space conversions (unit doubles, Bernoulli, weighted picks) are
// hand-rolled from raw 64-bit draws, so every stream is bit-reproducible
// across platforms and standard-library versions.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
        return SplitMix64(mix(seed + kGamma * (stream + 1)));
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    bool bernoulli(double p) { return next_unit() < p; }

    // Index drawn proportionally to the given nonnegative weights.
    std::size_t weighted_index(std::span<const double> weights) {
        if (weights.empty())
            throw std::invalid_argument("weighted_index: empty weight list");
        double total = 0.0;
        for (double w : weights) total += w;
        double u = next_unit() * total;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            if (u < weights[i]) return i;
            u -= weights[i];
        }
        return weights.size() - 1;
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace renewopt
