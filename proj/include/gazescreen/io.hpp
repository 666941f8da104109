#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gazescreen/core.hpp"
#include "gazescreen/errors.hpp"

namespace gazescreen {

namespace detail {

inline double parse_double(std::string_view field, const std::string& context) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw MalformedRow(context + ": not a finite number: '" + std::string(field) + "'");
    }
    return value;
}

inline std::string format_fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline std::string format_fixed9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

// Splits file content into lines; tolerates a trailing CR per line and a
// missing final newline.
inline std::vector<std::string_view> split_lines(std::string_view content) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < content.size()) {
        std::size_t nl = content.find('\n', start);
        if (nl == std::string_view::npos) nl = content.size();
        std::string_view line = content.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = nl + 1;
    }
    return lines;
}

inline void require_no_field_breakers(const std::string& s, const std::string& what) {
    if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos) {
        throw IoFailure(what + " must not contain commas or newlines: '" + s + "'");
    }
}

}  // namespace detail

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open for reading: " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoFailure("read failed: " + path.string());
    return content;
}

// All writers go through here: write to a sibling temp file, then rename,
// so consumers never observe partial output.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path parent = path.parent_path();
    if (!parent.empty()) {
        fs::create_directories(parent, ec);
        if (ec) throw IoFailure("cannot create directory " + parent.string() + ": " + ec.message());
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailure("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw IoFailure("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoFailure("rename failed for " + path.string() + ": " + ec.message());
    }
}

// ---------------------------------------------------------------------------
// Gaze CSV: header exactly `t_ms,x,y,valid`; reals at 6 decimals; valid 0/1;
// LF endings.
// ---------------------------------------------------------------------------

inline constexpr const char* kGazeCsvHeader = "t_ms,x,y,valid";

inline GazeRecording read_gaze_csv(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    const auto lines = detail::split_lines(content);
    if (lines.empty() || lines[0] != kGazeCsvHeader) {
        throw MalformedHeader(path.string() + ": expected header '" + kGazeCsvHeader + "'");
    }
    GazeRecording rec;
    rec.samples.reserve(lines.size() > 0 ? lines.size() - 1 : 0);
    double prev_t = 0.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty() && i + 1 == lines.size()) break;
        const std::string context = path.string() + ": row " + std::to_string(i);
        const auto fields = detail::split_fields(lines[i]);
        if (fields.size() != 4) throw MalformedRow(context + ": expected 4 fields");
        GazeSample s;
        s.t_ms = detail::parse_double(fields[0], context);
        s.x = detail::parse_double(fields[1], context);
        s.y = detail::parse_double(fields[2], context);
        if (fields[3] == "1") {
            s.valid = true;
        } else if (fields[3] == "0") {
            s.valid = false;
        } else {
            throw MalformedRow(context + ": valid flag must be 0 or 1");
        }
        if (!rec.samples.empty() && !(s.t_ms > prev_t)) {
            throw NonMonotonicTime(context + ": timestamp does not increase");
        }
        prev_t = s.t_ms;
        rec.samples.push_back(s);
    }
    return rec;
}

// Reads a recording and overlays sidecar metadata (normally a manifest entry).
inline GazeRecording read_gaze_csv(const std::filesystem::path& path, std::string subject_id,
                                   std::string stimulus_id, Familiarity familiarity,
                                   ScreenGeometry geometry = {}) {
    GazeRecording rec = read_gaze_csv(path);
    rec.subject_id = std::move(subject_id);
    rec.stimulus_id = std::move(stimulus_id);
    rec.familiarity = familiarity;
    rec.geometry = geometry;
    return rec;
}

inline std::string gaze_csv_string(const GazeRecording& rec) {
    const auto violations = validate_recording(rec);
    if (!violations.empty()) {
        throw Error("refusing to write invalid recording: " + violations.front());
    }
    std::string out = kGazeCsvHeader;
    out += '\n';
    for (const GazeSample& s : rec.samples) {
        out += detail::format_fixed6(s.t_ms);
        out += ',';
        out += detail::format_fixed6(s.x);
        out += ',';
        out += detail::format_fixed6(s.y);
        out += ',';
        out += s.valid ? '1' : '0';
        out += '\n';
    }
    return out;
}

inline void write_gaze_csv(const GazeRecording& rec, const std::filesystem::path& path) {
    atomic_write_file(path, gaze_csv_string(rec));
}

// ---------------------------------------------------------------------------
// AOI document (JSON): {"stimulus_id": ..., "regions": [{"zone", "rects"}]}
// in priority order. Duplicate zone entries merge into the first occurrence.
// ---------------------------------------------------------------------------

inline AoiSet read_aoi_json(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaViolation(path.string() + ": invalid JSON: " + e.what());
    }
    try {
        AoiSet aoi;
        aoi.stimulus_id = doc.at("stimulus_id").get<std::string>();
        for (const auto& region_doc : doc.at("regions")) {
            const ZoneLabel zone = zone_from_string(region_doc.at("zone").get<std::string>());
            std::vector<Rect> rects;
            for (const auto& rect_doc : region_doc.at("rects")) {
                if (!rect_doc.is_array() || rect_doc.size() != 4) {
                    throw SchemaViolation("rect must be [x_min,y_min,x_max,y_max]");
                }
                Rect r{rect_doc[0].get<double>(), rect_doc[1].get<double>(),
                       rect_doc[2].get<double>(), rect_doc[3].get<double>()};
                validate_rect(r);
                rects.push_back(r);
            }
            auto existing = std::find_if(aoi.regions.begin(), aoi.regions.end(),
                                         [&](const AoiRegion& a) { return a.zone == zone; });
            if (existing != aoi.regions.end()) {
                existing->rects.insert(existing->rects.end(), rects.begin(), rects.end());
            } else {
                aoi.regions.push_back(AoiRegion{zone, std::move(rects)});
            }
        }
        return aoi;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaViolation(path.string() + ": bad AOI document: " + e.what());
    }
}

inline std::string aoi_json_string(const AoiSet& aoi) {
    nlohmann::ordered_json doc;
    doc["stimulus_id"] = aoi.stimulus_id;
    doc["regions"] = nlohmann::ordered_json::array();
    for (const auto& region : aoi.regions) {
        nlohmann::ordered_json region_doc;
        region_doc["zone"] = to_string(region.zone);
        region_doc["rects"] = nlohmann::ordered_json::array();
        for (const auto& r : region.rects) {
            region_doc["rects"].push_back({r.x_min, r.y_min, r.x_max, r.y_max});
        }
        doc["regions"].push_back(region_doc);
    }
    return doc.dump(2) + "\n";
}

inline void write_aoi_json(const AoiSet& aoi, const std::filesystem::path& path) {
    atomic_write_file(path, aoi_json_string(aoi));
}

// ---------------------------------------------------------------------------
// Features CSV: subject_id,label,f_eyes,f_mouth,f_face_other,f_body,f_objects
// Fractions are quantized to 6 decimals with largest-remainder correction so
// every written row sums to exactly 1.000000.
// ---------------------------------------------------------------------------

inline constexpr const char* kFeaturesCsvHeader =
    "subject_id,label,f_eyes,f_mouth,f_face_other,f_body,f_objects";

namespace detail {

inline std::array<std::int64_t, kZoneCount> quantize_fractions(
    const std::array<double, kZoneCount>& fractions) {
    constexpr std::int64_t kScale = 1000000;
    std::array<std::int64_t, kZoneCount> units{};
    std::array<double, kZoneCount> remainders{};
    std::int64_t total = 0;
    for (std::size_t i = 0; i < kZoneCount; ++i) {
        const double scaled = fractions[i] * static_cast<double>(kScale);
        units[i] = static_cast<std::int64_t>(std::floor(scaled));
        remainders[i] = scaled - static_cast<double>(units[i]);
        total += units[i];
    }
    std::array<std::size_t, kZoneCount> order{0, 1, 2, 3, 4};
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
        return a < b;
    });
    std::int64_t deficit = kScale - total;
    for (std::size_t i = 0; deficit > 0 && i < kZoneCount; ++i, --deficit) units[order[i]] += 1;
    for (std::size_t i = 0; deficit < 0 && i < kZoneCount; ++i, ++deficit) {
        units[order[kZoneCount - 1 - i]] -= 1;
    }
    return units;
}

inline std::string format_units6(std::int64_t units) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld.%06lld", static_cast<long long>(units / 1000000),
                  static_cast<long long>(units % 1000000));
    return buf;
}

}  // namespace detail

inline std::string features_csv_string(const std::vector<FeatureVector>& rows) {
    std::string out = kFeaturesCsvHeader;
    out += '\n';
    for (const FeatureVector& fv : rows) {
        detail::require_no_field_breakers(fv.subject_id(), "subject_id");
        out += fv.subject_id();
        out += ',';
        if (fv.label()) out += to_string(*fv.label());
        const auto units = detail::quantize_fractions(fv.fractions());
        for (std::size_t i = 0; i < kZoneCount; ++i) {
            out += ',';
            out += detail::format_units6(units[i]);
        }
        out += '\n';
    }
    return out;
}

inline void write_features_csv(const std::vector<FeatureVector>& rows,
                               const std::filesystem::path& path) {
    atomic_write_file(path, features_csv_string(rows));
}

inline std::vector<FeatureVector> read_features_csv(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    const auto lines = detail::split_lines(content);
    if (lines.empty() || lines[0] != kFeaturesCsvHeader) {
        throw SchemaViolation(path.string() + ": expected header '" +
                              std::string(kFeaturesCsvHeader) + "'");
    }
    std::vector<FeatureVector> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty() && i + 1 == lines.size()) break;
        const std::string context = path.string() + ": row " + std::to_string(i);
        const auto fields = detail::split_fields(lines[i]);
        if (fields.size() != 2 + kZoneCount) {
            throw SchemaViolation(context + ": expected 7 fields");
        }
        std::optional<Label> label;
        if (!fields[1].empty()) label = label_from_string(std::string(fields[1]));
        std::array<double, kZoneCount> fractions{};
        double sum = 0.0;
        for (std::size_t z = 0; z < kZoneCount; ++z) {
            fractions[z] = detail::parse_double(fields[2 + z], context);
            sum += fractions[z];
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw RowSumViolation(context + ": fractions sum to " + std::to_string(sum));
        }
        for (auto& f : fractions) f /= sum;
        rows.emplace_back(fractions, std::string(fields[0]), label);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Cohort manifest (JSON array of entries with relative recording paths).
// ---------------------------------------------------------------------------

struct ManifestEntry {
    std::string subject_id;
    Label label = Label::TD;
    std::string recording;  // path relative to the manifest's directory
    std::string stimulus_id;
    Familiarity familiarity = Familiarity::Unspecified;
};

struct CohortManifest {
    std::vector<ManifestEntry> entries;
};

inline void validate_manifest(const CohortManifest& manifest) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : manifest.entries) {
        if (!seen.insert({e.subject_id, e.stimulus_id}).second) {
            throw SchemaViolation("duplicate (subject_id, stimulus_id): " + e.subject_id + ", " +
                                  e.stimulus_id);
        }
    }
}

inline CohortManifest read_manifest_json(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaViolation(path.string() + ": invalid JSON: " + e.what());
    }
    try {
        CohortManifest manifest;
        for (const auto& entry_doc : doc) {
            ManifestEntry e;
            e.subject_id = entry_doc.at("subject_id").get<std::string>();
            e.label = label_from_string(entry_doc.at("label").get<std::string>());
            e.recording = entry_doc.at("recording").get<std::string>();
            e.stimulus_id = entry_doc.at("stimulus_id").get<std::string>();
            e.familiarity = familiarity_from_string(entry_doc.at("familiarity").get<std::string>());
            manifest.entries.push_back(std::move(e));
        }
        validate_manifest(manifest);
        return manifest;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaViolation(path.string() + ": bad manifest: " + e.what());
    }
}

inline std::string manifest_json_string(const CohortManifest& manifest) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& e : manifest.entries) {
        nlohmann::ordered_json entry_doc;
        entry_doc["subject_id"] = e.subject_id;
        entry_doc["label"] = to_string(e.label);
        entry_doc["recording"] = e.recording;
        entry_doc["stimulus_id"] = e.stimulus_id;
        entry_doc["familiarity"] = to_string(e.familiarity);
        doc.push_back(entry_doc);
    }
    return doc.dump(2) + "\n";
}

inline void write_manifest_json(const CohortManifest& manifest,
                                const std::filesystem::path& path) {
    validate_manifest(manifest);
    atomic_write_file(path, manifest_json_string(manifest));
}

}  // namespace gazescreen
