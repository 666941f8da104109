#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gazescreen/core.hpp"
#include "gazescreen/errors.hpp"

namespace gazescreen {

struct IdtParams {
    // Dispersion = (max x - min x) + (max y - min y) over a window, in
    // normalized screen fractions.
    double dispersion_threshold = 0.02;
    double min_duration_ms = 100.0;
};

struct IvtParams {
    double velocity_threshold = 1.0;  // screen fractions per second
    double min_duration_ms = 100.0;
};

namespace detail {

// Maximal runs of consecutive valid samples; invalid samples split runs so a
// fixation never spans a tracking gap.
inline std::vector<std::vector<std::size_t>> valid_runs(const GazeRecording& rec) {
    std::vector<std::vector<std::size_t>> runs;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        if (rec.samples[i].valid) {
            current.push_back(i);
        } else if (!current.empty()) {
            runs.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) runs.push_back(std::move(current));
    return runs;
}

inline std::size_t count_valid(const GazeRecording& rec) {
    std::size_t n = 0;
    for (const auto& s : rec.samples) n += s.valid ? 1 : 0;
    return n;
}

inline Fixation make_fixation(const GazeRecording& rec, const std::vector<std::size_t>& run,
                              std::size_t first, std::size_t last) {
    Fixation f;
    double sx = 0.0, sy = 0.0;
    for (std::size_t k = first; k <= last; ++k) {
        sx += rec.samples[run[k]].x;
        sy += rec.samples[run[k]].y;
    }
    const double n = static_cast<double>(last - first + 1);
    f.centroid_x = sx / n;
    f.centroid_y = sy / n;
    f.start_ms = rec.samples[run[first]].t_ms;
    f.duration_ms = rec.samples[run[last]].t_ms - rec.samples[run[first]].t_ms;
    f.sample_count = last - first + 1;
    return f;
}

}  // namespace detail

// Dispersion-threshold identification. From each window start, grow the
// window while dispersion stays within the threshold; emit when the maximal
// window covers the minimum duration, otherwise advance one sample.
inline std::vector<Fixation> detect_fixations_idt(const GazeRecording& rec, const IdtParams& p) {
    if (detail::count_valid(rec) < 2) {
        throw InsufficientData("I-DT needs at least 2 valid samples");
    }
    std::vector<Fixation> out;
    for (const auto& run : detail::valid_runs(rec)) {
        std::size_t i = 0;
        while (i < run.size()) {
            double min_x = rec.samples[run[i]].x, max_x = min_x;
            double min_y = rec.samples[run[i]].y, max_y = min_y;
            std::size_t j = i;
            while (j + 1 < run.size()) {
                const GazeSample& s = rec.samples[run[j + 1]];
                const double nmin_x = std::min(min_x, s.x), nmax_x = std::max(max_x, s.x);
                const double nmin_y = std::min(min_y, s.y), nmax_y = std::max(max_y, s.y);
                if ((nmax_x - nmin_x) + (nmax_y - nmin_y) > p.dispersion_threshold) break;
                min_x = nmin_x; max_x = nmax_x; min_y = nmin_y; max_y = nmax_y;
                ++j;
            }
            if (rec.samples[run[j]].t_ms - rec.samples[run[i]].t_ms >= p.min_duration_ms) {
                out.push_back(detail::make_fixation(rec, run, i, j));
                i = j + 1;
            } else {
                ++i;
            }
        }
    }
    return out;
}

// Velocity-threshold identification: runs of consecutive samples whose
// pairwise velocities stay below the threshold.
inline std::vector<Fixation> detect_fixations_ivt(const GazeRecording& rec, const IvtParams& p) {
    if (detail::count_valid(rec) < 2) {
        throw InsufficientData("I-VT needs at least 2 valid samples");
    }
    std::vector<Fixation> out;
    for (const auto& run : detail::valid_runs(rec)) {
        if (run.size() < 2) continue;
        // below[k] tells whether the velocity between run[k] and run[k+1]
        // stays under the threshold.
        std::vector<bool> below(run.size() - 1);
        for (std::size_t k = 0; k + 1 < run.size(); ++k) {
            const GazeSample& a = rec.samples[run[k]];
            const GazeSample& b = rec.samples[run[k + 1]];
            const double dt_s = (b.t_ms - a.t_ms) / 1000.0;
            if (dt_s <= 0.0) {
                throw ZeroTimestep("equal timestamps on valid samples at index " +
                                   std::to_string(run[k + 1]));
            }
            below[k] = std::hypot(b.x - a.x, b.y - a.y) / dt_s < p.velocity_threshold;
        }
        std::size_t k = 0;
        while (k < below.size()) {
            if (!below[k]) {
                ++k;
                continue;
            }
            std::size_t end = k;
            while (end + 1 < below.size() && below[end + 1]) ++end;
            // samples run[k] .. run[end+1] form the candidate fixation
            if (rec.samples[run[end + 1]].t_ms - rec.samples[run[k]].t_ms >= p.min_duration_ms) {
                out.push_back(detail::make_fixation(rec, run, k, end + 1));
            }
            k = end + 1;
        }
    }
    return out;
}

// Total fixation duration per zone; fixations are assigned by centroid.
inline std::array<double, kZoneCount> fixation_zone_durations(const std::vector<Fixation>& fixes,
                                                              const AoiSet& aoi) {
    std::array<double, kZoneCount> totals{};
    for (const Fixation& f : fixes) {
        totals[static_cast<int>(zone_of(f.centroid_x, f.centroid_y, aoi))] += f.duration_ms;
    }
    return totals;
}

inline std::string fixations_csv_string(const std::vector<Fixation>& fixes) {
    std::string out = "start_ms,duration_ms,cx,cy,sample_count\n";
    char buf[160];
    for (const Fixation& f : fixes) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%zu\n", f.start_ms, f.duration_ms,
                      f.centroid_x, f.centroid_y, f.sample_count);
        out += buf;
    }
    return out;
}

}  // namespace gazescreen
