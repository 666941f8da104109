#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "gazescreen/core.hpp"
#include "gazescreen/rng.hpp"

namespace gazescreen {

// Webcam-noise simulation: i.i.d. Gaussian perturbation of each valid
// sample's coordinates. Draws come from counter-based streams keyed
// (seed, axis, sample index), so output is reproducible and
// order-independent.
struct NoiseSpec {
    double sigma_frac = 0.025;  // per-axis std dev, fraction of screen
    std::uint64_t seed = 0;
};

inline GazeRecording add_webcam_noise(const GazeRecording& rec, const NoiseSpec& spec) {
    GazeRecording out = rec;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        GazeSample& s = out.samples[i];
        if (!s.valid) continue;
        s.x = std::clamp(s.x + spec.sigma_frac * rng::gaussian(spec.seed, rng::kNoiseX, i), 0.0, 1.0);
        s.y = std::clamp(s.y + spec.sigma_frac * rng::gaussian(spec.seed, rng::kNoiseY, i), 0.0, 1.0);
    }
    return out;
}

// One noised copy per sigma; copy k uses seed + k.
inline std::vector<GazeRecording> noise_sweep(const GazeRecording& rec,
                                              const std::vector<double>& sigmas,
                                              std::uint64_t seed) {
    std::vector<GazeRecording> out;
    out.reserve(sigmas.size());
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
        out.push_back(add_webcam_noise(rec, NoiseSpec{sigmas[k], seed + k}));
    }
    return out;
}

}  // namespace gazescreen
