#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "gazescreen/core.hpp"
#include "gazescreen/errors.hpp"
#include "gazescreen/io.hpp"

namespace gazescreen {

// Dwell-time distribution of one recording over the five zones.
//
// Every valid sample except the last contributes its forward interval
// (t of next valid sample - its own t) to the zone its coordinates fall in;
// the last valid sample contributes the median of those intervals. Invalid
// samples contribute nothing and the total is the attributed time, so the
// fractions always form a distribution.
inline FeatureVector dwell_fractions(const GazeRecording& rec, const AoiSet& aoi) {
    std::vector<std::size_t> valid;
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        if (rec.samples[i].valid) valid.push_back(i);
    }
    if (valid.empty()) throw EmptyRecording("recording has no valid samples");

    std::array<double, kZoneCount> time_per_zone{};
    std::vector<double> intervals;
    intervals.reserve(valid.size());
    for (std::size_t k = 0; k + 1 < valid.size(); ++k) {
        const GazeSample& s = rec.samples[valid[k]];
        const double dt = rec.samples[valid[k + 1]].t_ms - s.t_ms;
        time_per_zone[static_cast<int>(zone_of(s.x, s.y, aoi))] += dt;
        intervals.push_back(dt);
    }
    double tail = 1.0;
    if (!intervals.empty()) {
        std::vector<double> sorted = intervals;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        tail = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    }
    const GazeSample& last = rec.samples[valid.back()];
    time_per_zone[static_cast<int>(zone_of(last.x, last.y, aoi))] += tail;

    double total = 0.0;
    for (double t : time_per_zone) total += t;
    std::array<double, kZoneCount> fractions{};
    for (std::size_t z = 0; z < kZoneCount; ++z) fractions[z] = time_per_zone[z] / total;
    return FeatureVector(fractions, rec.subject_id);
}

struct ZoneStats {
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation
};

using CohortZoneStats = std::map<Label, std::array<ZoneStats, kZoneCount>>;

inline CohortZoneStats cohort_zone_means(const std::vector<FeatureVector>& features) {
    if (features.empty()) throw EmptyInput("no feature vectors");
    std::map<Label, std::vector<const FeatureVector*>> by_label;
    for (const auto& fv : features) {
        if (!fv.label()) throw EmptyInput("unlabeled feature vector for " + fv.subject_id());
        by_label[*fv.label()].push_back(&fv);
    }
    CohortZoneStats stats;
    for (const auto& [label, rows] : by_label) {
        std::array<ZoneStats, kZoneCount> zs{};
        const double n = static_cast<double>(rows.size());
        for (std::size_t z = 0; z < kZoneCount; ++z) {
            double mean = 0.0;
            for (const auto* fv : rows) mean += fv->fractions()[z];
            mean /= n;
            double var = 0.0;
            for (const auto* fv : rows) {
                const double d = fv->fractions()[z] - mean;
                var += d * d;
            }
            zs[z] = ZoneStats{mean, std::sqrt(var / n)};
        }
        stats[label] = zs;
    }
    return stats;
}

// The data behind a Fig 2-style bar chart: one row per
// condition x label x zone.
inline std::string zone_distribution_csv_string(const CohortZoneStats& clean,
                                                const CohortZoneStats& noised) {
    if (clean.empty() || noised.empty()) throw EmptyInput("empty cohort stats");
    if (clean.size() != noised.size()) {
        throw EmptyInput("clean and noised stats must cover the same labels");
    }
    std::string out = "condition,label,zone,mean,std\n";
    auto emit = [&out](const char* condition, const CohortZoneStats& stats) {
        for (const auto& [label, zs] : stats) {
            for (ZoneLabel z : kAllZones) {
                out += condition;
                out += ',';
                out += to_string(label);
                out += ',';
                out += to_string(z);
                out += ',';
                out += detail::format_fixed6(zs[static_cast<int>(z)].mean);
                out += ',';
                out += detail::format_fixed6(zs[static_cast<int>(z)].stddev);
                out += '\n';
            }
        }
    };
    emit("clean", clean);
    emit("noised", noised);
    return out;
}

inline void emit_zone_distribution_table(const CohortZoneStats& clean,
                                         const CohortZoneStats& noised,
                                         const std::filesystem::path& path) {
    atomic_write_file(path, zone_distribution_csv_string(clean, noised));
}

}  // namespace gazescreen
