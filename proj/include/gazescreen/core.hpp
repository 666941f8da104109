#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gazescreen/errors.hpp"

namespace gazescreen {

// ---------------------------------------------------------------------------
// Screen / samples
// ---------------------------------------------------------------------------

struct ScreenGeometry {
    int width_px = 1280;
    int height_px = 720;
};

// One tracker sample. Coordinates are normalized screen fractions,
// (0,0) = top-left, (1,1) = bottom-right. `valid` is the tracker's
// confidence flag; invalid samples keep whatever coordinates the tracker
// reported but carry no gaze information.
struct GazeSample {
    double t_ms = 0.0;
    double x = 0.0;
    double y = 0.0;
    bool valid = true;
};

enum class Familiarity { Known, Unknown, Unspecified };

inline const char* to_string(Familiarity f) {
    switch (f) {
        case Familiarity::Known: return "Known";
        case Familiarity::Unknown: return "Unknown";
        case Familiarity::Unspecified: return "Unspecified";
    }
    return "Unspecified";
}

inline Familiarity familiarity_from_string(const std::string& s) {
    if (s == "Known") return Familiarity::Known;
    if (s == "Unknown") return Familiarity::Unknown;
    if (s == "Unspecified") return Familiarity::Unspecified;
    throw SchemaViolation("unknown familiarity value: " + s);
}

struct GazeRecording {
    std::string subject_id;
    std::string stimulus_id;
    Familiarity familiarity = Familiarity::Unspecified;
    ScreenGeometry geometry;
    std::vector<GazeSample> samples;
};

// ---------------------------------------------------------------------------
// Zones / areas of interest
// ---------------------------------------------------------------------------

enum class ZoneLabel : int { Eyes = 0, Mouth = 1, FaceOther = 2, Body = 3, Objects = 4 };

inline constexpr std::size_t kZoneCount = 5;

inline constexpr std::array<ZoneLabel, kZoneCount> kAllZones = {
    ZoneLabel::Eyes, ZoneLabel::Mouth, ZoneLabel::FaceOther,
    ZoneLabel::Body, ZoneLabel::Objects};

inline const char* to_string(ZoneLabel z) {
    switch (z) {
        case ZoneLabel::Eyes: return "Eyes";
        case ZoneLabel::Mouth: return "Mouth";
        case ZoneLabel::FaceOther: return "FaceOther";
        case ZoneLabel::Body: return "Body";
        case ZoneLabel::Objects: return "Objects";
    }
    return "Objects";
}

inline ZoneLabel zone_from_string(const std::string& s) {
    if (s == "Eyes") return ZoneLabel::Eyes;
    if (s == "Mouth") return ZoneLabel::Mouth;
    if (s == "FaceOther") return ZoneLabel::FaceOther;
    if (s == "Body") return ZoneLabel::Body;
    if (s == "Objects") return ZoneLabel::Objects;
    throw SchemaViolation("unknown zone name: " + s);
}

// Axis-aligned rectangle in normalized coordinates; containment is inclusive.
struct Rect {
    double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;

    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
    double centroid_x() const { return 0.5 * (x_min + x_max); }
    double centroid_y() const { return 0.5 * (y_min + y_max); }
};

struct AoiRegion {
    ZoneLabel zone = ZoneLabel::Objects;
    std::vector<Rect> rects;
};

// Prioritized zone geometry over one stimulus. Earlier regions win on
// overlap; any point matching no rectangle is Objects.
struct AoiSet {
    std::string stimulus_id;
    std::vector<AoiRegion> regions;
};

inline void validate_rect(const Rect& r) {
    if (!(r.x_min >= 0.0 && r.x_min < r.x_max && r.x_max <= 1.0) ||
        !(r.y_min >= 0.0 && r.y_min < r.y_max && r.y_max <= 1.0)) {
        std::ostringstream os;
        os << "rect out of range or misordered: [" << r.x_min << "," << r.y_min
           << "," << r.x_max << "," << r.y_max << "]";
        throw SchemaViolation(os.str());
    }
}

inline ZoneLabel zone_of(double x, double y, const AoiSet& aoi) {
    for (const auto& region : aoi.regions) {
        for (const auto& r : region.rects) {
            if (r.contains(x, y)) return region.zone;
        }
    }
    return ZoneLabel::Objects;
}

// ---------------------------------------------------------------------------
// Features / fixations / labels
// ---------------------------------------------------------------------------

enum class Label : int { ASD = 1, TD = 0 };

inline const char* to_string(Label l) { return l == Label::ASD ? "ASD" : "TD"; }

inline Label label_from_string(const std::string& s) {
    if (s == "ASD") return Label::ASD;
    if (s == "TD") return Label::TD;
    throw SchemaViolation("unknown label value: " + s);
}

// Per-recording dwell-time distribution over the five zones. The
// constructor enforces the distribution invariant (entries in [0,1],
// sum 1 within 1e-9).
class FeatureVector {
  public:
    FeatureVector(std::array<double, kZoneCount> fractions, std::string subject_id,
                  std::optional<Label> label = std::nullopt)
        : fractions_(fractions), subject_id_(std::move(subject_id)), label_(label) {
        double sum = 0.0;
        for (double f : fractions_) {
            if (!(f >= 0.0 && f <= 1.0) || !std::isfinite(f)) {
                throw Error("feature fraction outside [0,1]");
            }
            sum += f;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            std::ostringstream os;
            os << "feature fractions sum to " << sum << ", expected 1 within 1e-9";
            throw Error(os.str());
        }
    }

    double fraction(ZoneLabel z) const { return fractions_[static_cast<int>(z)]; }
    const std::array<double, kZoneCount>& fractions() const { return fractions_; }
    const std::string& subject_id() const { return subject_id_; }
    std::optional<Label> label() const { return label_; }
    void set_label(std::optional<Label> l) { label_ = l; }

  private:
    std::array<double, kZoneCount> fractions_;
    std::string subject_id_;
    std::optional<Label> label_;
};

// A stable-gaze event detected from raw samples.
struct Fixation {
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    double start_ms = 0.0;
    double duration_ms = 0.0;
    std::size_t sample_count = 0;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

// Returns one description per violated invariant; empty means the recording
// is well formed. Violations are data diagnostics, not exceptions.
inline std::vector<std::string> validate_recording(const GazeRecording& rec) {
    std::vector<std::string> violations;
    if (rec.geometry.width_px < 1 || rec.geometry.height_px < 1) {
        violations.push_back("screen geometry must be at least 1x1 px");
    }
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        const GazeSample& s = rec.samples[i];
        if (!std::isfinite(s.t_ms) || s.t_ms < 0.0) {
            violations.push_back("non-finite or negative timestamp at index " + std::to_string(i));
        }
        if (i > 0 && !(s.t_ms > rec.samples[i - 1].t_ms)) {
            violations.push_back("non-increasing timestamp at index " + std::to_string(i));
        }
        if (s.valid) {
            if (!std::isfinite(s.x) || !std::isfinite(s.y) ||
                s.x < 0.0 || s.x > 1.0 || s.y < 0.0 || s.y > 1.0) {
                violations.push_back("coordinate out of range at index " + std::to_string(i));
            }
        }
    }
    return violations;
}

}  // namespace gazescreen
