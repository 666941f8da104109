#pragma once

// Counter-based random streams: every draw is a pure function of
// (seed, stream id, counter), so parallel and sequential evaluation agree
// bit for bit and any sample can be regenerated in isolation.
//
// Algorithm "splitmix64-boxmuller-v1": the splitmix64 finalizer is chained
// over the key components to produce 64 uniform bits; normal deviates come
// from the Box-Muller cosine branch.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gazescreen::rng {

inline constexpr const char* kAlgorithm = "splitmix64-boxmuller-v1";

// Stream ids. Fixed values are part of the reproducibility contract.
enum Stream : std::uint64_t {
    kNoiseX = 1,
    kNoiseY = 2,
    kVisitDuration = 3,
    kVisitStay = 4,
    kVisitZone = 5,
    kJitterX = 6,
    kJitterY = 7,
    kSubjectWeights = 8,
    kInitialZone = 9,
    kShuffle = 10,
    kWeightInit = 11,
};

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Folds one key component into a hash state.
inline std::uint64_t chain(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ mix64(v));
}

// Derives a child seed; used to give subjects / pipeline stages
// independent stream families.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
    return chain(mix64(seed), tag);
}

inline std::uint64_t bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return chain(chain(mix64(seed), stream), counter);
}

// Uniform in the open interval (0,1).
inline double u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return (static_cast<double>(bits(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal deviate, one per counter value.
inline double gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const double u1 = u01(seed, stream, 2 * counter);
    const double u2 = u01(seed, stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Exponential with the given mean, one per counter value.
inline double exponential(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                          double mean) {
    return -mean * std::log(u01(seed, stream, counter));
}

// Sequential view over one (seed, stream) pair for consumers that need an
// unbounded number of draws (rejection sampling, shuffles).
class CounterStream {
  public:
    CounterStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    double next_u01() { return u01(seed_, stream_, counter_++); }

    double next_gaussian() {
        const double u1 = next_u01();
        const double u2 = next_u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(next_u01() * static_cast<double>(n)) % n;
    }

    // Marsaglia-Tsang; alpha > 0.
    double next_gamma(double alpha) {
        if (alpha < 1.0) {
            const double u = next_u01();
            return next_gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
        }
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = next_gaussian();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = next_u01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace gazescreen::rng
