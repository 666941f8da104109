#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gazescreen/core.hpp"
#include "gazescreen/errors.hpp"
#include "gazescreen/io.hpp"
#include "gazescreen/rng.hpp"

namespace gazescreen {

// Behavioural profile of one simulated group: a stationary zone
// distribution plus visit dynamics. Gaze is a zone-visit Markov chain with
// exponentially distributed visit durations; at each visit end the gaze
// stays put with probability `stickiness`, otherwise the next zone is drawn
// fresh from the weights. During a visit, samples scatter around the zone
// anchor with per-axis Gaussian jitter.
struct GazeProfile {
    std::array<double, kZoneCount> zone_weights{};
    double stickiness = 0.30;
    double mean_dwell_ms = 300.0;
    double jitter_frac = 0.015;
    double sample_rate_hz = 60.0;
};

inline void validate_profile(const GazeProfile& p) {
    double sum = 0.0;
    for (double w : p.zone_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw DegenerateProfile("zone weight must be >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DegenerateProfile("zone weights must sum to 1");
    if (!(p.stickiness >= 0.0 && p.stickiness < 1.0)) {
        throw DegenerateProfile("stickiness must lie in [0,1)");
    }
    if (!(p.mean_dwell_ms > 0.0)) throw DegenerateProfile("mean_dwell_ms must be positive");
    if (!(p.jitter_frac >= 0.0)) throw DegenerateProfile("jitter_frac must be >= 0");
    if (!(p.sample_rate_hz > 0.0)) throw DegenerateProfile("sample_rate_hz must be positive");
}

inline GazeProfile default_td_profile() {
    GazeProfile p;
    p.zone_weights = {0.40, 0.20, 0.20, 0.10, 0.10};
    return p;
}

inline GazeProfile default_asd_profile() {
    GazeProfile p;
    p.zone_weights = {0.20, 0.10, 0.15, 0.15, 0.40};
    return p;
}

// Default AOI template for the synthetic face stimulus. Zones are tight
// bands around their anchor points (the geometry every profile anchors to),
// with the catch-all Objects anchor sitting in the corridor between the
// hair and hand rectangles at the right edge of the screen.
inline AoiSet default_aoi() {
    AoiSet aoi;
    aoi.stimulus_id = "face_default";
    aoi.regions = {
        {ZoneLabel::Eyes, {Rect{0.30, 0.305, 0.70, 0.355}}},
        {ZoneLabel::Mouth, {Rect{0.38, 0.555, 0.62, 0.605}}},
        {ZoneLabel::FaceOther, {Rect{0.40, 0.355, 0.60, 0.555},   // nose/cheek band (anchor)
                                Rect{0.70, 0.25, 0.895, 0.75}}},  // hair/ear area
        {ZoneLabel::Body, {Rect{0.20, 0.85, 0.80, 1.00},          // torso band (anchor)
                           Rect{0.945, 0.30, 1.00, 0.70}}},       // hand at frame edge
    };
    return aoi;
}

inline constexpr double kObjectsAnchorX = 0.92;
inline constexpr double kObjectsAnchorY = 0.50;

struct CohortSpec {
    int n_per_group = 25;
    GazeProfile td_profile = default_td_profile();
    GazeProfile asd_profile = default_asd_profile();
    double duration_ms = 120000.0;
    AoiSet aoi = default_aoi();
    std::uint64_t seed = 42;
    // Dirichlet concentration scale for per-subject zone-weight perturbation
    // (alpha_z = weight_z * subject_variability); 0 disables perturbation.
    double subject_variability = 1000.0;
};

// Per-subject stationary weights: Dirichlet(alpha = weights * variability).
// variability == 0 is defined as the profile weights exactly.
inline std::array<double, kZoneCount> sample_subject_weights(
    const std::array<double, kZoneCount>& weights, double variability, std::uint64_t seed) {
    if (variability < 0.0) throw DegenerateProfile("subject_variability must be >= 0");
    if (variability == 0.0) return weights;
    rng::CounterStream stream(seed, rng::kSubjectWeights);
    std::array<double, kZoneCount> draws{};
    double total = 0.0;
    for (std::size_t z = 0; z < kZoneCount; ++z) {
        const double alpha = weights[z] * variability;
        draws[z] = alpha > 0.0 ? stream.next_gamma(alpha) : 0.0;
        total += draws[z];
    }
    for (auto& d : draws) d /= total;
    return draws;
}

namespace detail {

inline std::array<std::pair<double, double>, kZoneCount> zone_anchors(
    const AoiSet& aoi, const std::array<double, kZoneCount>& weights) {
    std::array<std::pair<double, double>, kZoneCount> anchors;
    anchors.fill({kObjectsAnchorX, kObjectsAnchorY});
    std::array<bool, kZoneCount> found{};
    found[static_cast<int>(ZoneLabel::Objects)] = true;
    for (const auto& region : aoi.regions) {
        const int z = static_cast<int>(region.zone);
        if (found[z] || region.rects.empty()) continue;
        anchors[z] = {region.rects.front().centroid_x(), region.rects.front().centroid_y()};
        found[z] = true;
    }
    for (std::size_t z = 0; z < kZoneCount; ++z) {
        if (weights[z] > 0.0 && !found[z]) {
            throw SchemaViolation(std::string("AOI defines no rectangles for zone ") +
                                  to_string(static_cast<ZoneLabel>(z)));
        }
    }
    return anchors;
}

inline std::size_t draw_zone(double u, const std::array<double, kZoneCount>& weights) {
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t z = 0; z < kZoneCount; ++z) {
        if (weights[z] <= 0.0) continue;
        last_positive = z;
        cum += weights[z];
        if (u < cum) return z;
    }
    return last_positive;
}

}  // namespace detail

inline GazeRecording generate_recording(const std::array<double, kZoneCount>& weights,
                                        const GazeProfile& profile, const AoiSet& aoi,
                                        double duration_ms, std::uint64_t seed,
                                        const std::string& subject_id) {
    validate_profile(profile);
    if (!(duration_ms > 0.0)) throw DegenerateProfile("duration_ms must be positive");
    const auto anchors = detail::zone_anchors(aoi, weights);

    rng::CounterStream duration_stream(seed, rng::kVisitDuration);
    rng::CounterStream stay_stream(seed, rng::kVisitStay);
    rng::CounterStream zone_stream(seed, rng::kVisitZone);

    GazeRecording rec;
    rec.subject_id = subject_id;
    rec.stimulus_id = aoi.stimulus_id;
    rec.familiarity = Familiarity::Unknown;

    std::size_t zone = detail::draw_zone(rng::u01(seed, rng::kInitialZone, 0), weights);
    double visit_end = -profile.mean_dwell_ms * std::log(duration_stream.next_u01());

    const double period_ms = 1000.0 / profile.sample_rate_hz;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * period_ms;
        if (t >= duration_ms) break;
        while (t >= visit_end) {
            if (stay_stream.next_u01() >= profile.stickiness) {
                zone = detail::draw_zone(zone_stream.next_u01(), weights);
            }
            visit_end += -profile.mean_dwell_ms * std::log(duration_stream.next_u01());
        }
        GazeSample s;
        s.t_ms = t;
        s.x = std::clamp(
            anchors[zone].first + profile.jitter_frac * rng::gaussian(seed, rng::kJitterX, k),
            0.0, 1.0);
        s.y = std::clamp(
            anchors[zone].second + profile.jitter_frac * rng::gaussian(seed, rng::kJitterY, k),
            0.0, 1.0);
        s.valid = true;
        rec.samples.push_back(s);
    }
    return rec;
}

// Generates 2 x n_per_group labeled recordings plus the manifest, all under
// out_dir. Pure function of the spec: per-subject seeds derive from
// (seed, group, index), so parallel generation would match sequential.
inline CohortManifest generate_cohort(const CohortSpec& spec,
                                      const std::filesystem::path& out_dir) {
    if (spec.n_per_group < 1) throw DegenerateProfile("n_per_group must be >= 1");
    validate_profile(spec.td_profile);
    validate_profile(spec.asd_profile);

    CohortManifest manifest;
    const std::array<std::pair<Label, const GazeProfile*>, 2> groups = {
        std::make_pair(Label::TD, &spec.td_profile),
        std::make_pair(Label::ASD, &spec.asd_profile)};

    for (const auto& [label, profile] : groups) {
        const std::uint64_t group_tag = label == Label::TD ? 1 : 2;
        for (int i = 0; i < spec.n_per_group; ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "%s_%03d", label == Label::TD ? "td" : "asd", i);
            const std::uint64_t subject_seed =
                rng::chain(rng::derive(spec.seed, group_tag), static_cast<std::uint64_t>(i));
            const auto weights = sample_subject_weights(profile->zone_weights,
                                                        spec.subject_variability, subject_seed);
            GazeRecording rec = generate_recording(weights, *profile, spec.aoi, spec.duration_ms,
                                                   subject_seed, id);
            const std::string filename = std::string(id) + ".csv";
            write_gaze_csv(rec, out_dir / filename);
            manifest.entries.push_back(
                ManifestEntry{id, label, filename, spec.aoi.stimulus_id, Familiarity::Unknown});
        }
    }
    write_manifest_json(manifest, out_dir / "manifest.json");
    return manifest;
}

// ---------------------------------------------------------------------------
// Profile overrides document: {"td": {...}, "asd": {...}} mirroring
// GazeProfile fields, zone weights keyed by zone name.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json profile_to_json(const GazeProfile& p) {
    nlohmann::ordered_json weights;
    for (ZoneLabel z : kAllZones) weights[to_string(z)] = p.zone_weights[static_cast<int>(z)];
    nlohmann::ordered_json doc;
    doc["zone_weights"] = weights;
    doc["stickiness"] = p.stickiness;
    doc["mean_dwell_ms"] = p.mean_dwell_ms;
    doc["jitter_frac"] = p.jitter_frac;
    doc["sample_rate_hz"] = p.sample_rate_hz;
    return doc;
}

inline GazeProfile profile_from_json(const nlohmann::json& doc) {
    GazeProfile p;
    const auto& weights = doc.at("zone_weights");
    for (ZoneLabel z : kAllZones) {
        p.zone_weights[static_cast<int>(z)] = weights.at(to_string(z)).get<double>();
    }
    p.stickiness = doc.value("stickiness", p.stickiness);
    p.mean_dwell_ms = doc.value("mean_dwell_ms", p.mean_dwell_ms);
    p.jitter_frac = doc.value("jitter_frac", p.jitter_frac);
    p.sample_rate_hz = doc.value("sample_rate_hz", p.sample_rate_hz);
    validate_profile(p);
    return p;
}

}  // namespace detail

inline std::pair<GazeProfile, GazeProfile> read_profiles_json(
    const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaViolation(path.string() + ": invalid JSON: " + e.what());
    }
    try {
        return {detail::profile_from_json(doc.at("td")), detail::profile_from_json(doc.at("asd"))};
    } catch (const nlohmann::json::exception& e) {
        throw SchemaViolation(path.string() + ": bad profiles document: " + e.what());
    }
}

inline void write_profiles_json(const GazeProfile& td, const GazeProfile& asd,
                                const std::filesystem::path& path) {
    nlohmann::ordered_json doc;
    doc["td"] = detail::profile_to_json(td);
    doc["asd"] = detail::profile_to_json(asd);
    atomic_write_file(path, doc.dump(2) + "\n");
}

}  // namespace gazescreen
