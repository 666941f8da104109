#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gazescreen/core.hpp"
#include "gazescreen/io.hpp"
#include "gazescreen/synth.hpp"
#include "test_support.hpp"

using namespace gazescreen;
using testsupport::TempDir;

TEST_CASE("gaze CSV: direct parse of a two-sample file") {
    TempDir dir("gaze_parse");
    const auto path = dir.path() / "r.csv";
    atomic_write_file(path, "t_ms,x,y,valid\n0,0.5,0.5,1\n16.7,0.52,0.5,1\n");
    const GazeRecording rec = read_gaze_csv(path);
    REQUIRE(rec.samples.size() == 2);
    CHECK(rec.samples[0].t_ms == 0.0);
    CHECK(rec.samples[1].x == 0.52);
    CHECK(rec.samples[1].valid);
}

TEST_CASE("gaze CSV: malformed row reports its index") {
    TempDir dir("gaze_bad_row");
    const auto path = dir.path() / "r.csv";
    atomic_write_file(path, "t_ms,x,y,valid\nabc,0.5,0.5,1\n");
    CHECK_THROWS_MATCHES(read_gaze_csv(path), MalformedRow,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("row 1")));
}

TEST_CASE("gaze CSV: wrong header is rejected") {
    TempDir dir("gaze_bad_header");
    const auto path = dir.path() / "r.csv";
    atomic_write_file(path, "time,x,y,ok\n0,0.5,0.5,1\n");
    CHECK_THROWS_AS(read_gaze_csv(path), MalformedHeader);
}

TEST_CASE("gaze CSV: non-monotonic time reports the row") {
    TempDir dir("gaze_nonmono");
    const auto path = dir.path() / "r.csv";
    atomic_write_file(path, "t_ms,x,y,valid\n0,0.5,0.5,1\n0,0.6,0.5,1\n");
    CHECK_THROWS_MATCHES(read_gaze_csv(path), NonMonotonicTime,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("row 2")));
}

TEST_CASE("gaze CSV: empty recording writes only the header line") {
    TempDir dir("gaze_empty");
    const auto path = dir.path() / "r.csv";
    write_gaze_csv(GazeRecording{}, path);
    CHECK(read_file(path) == "t_ms,x,y,valid\n");
}

TEST_CASE("gaze CSV: canonical sample formatting") {
    GazeRecording rec = testsupport::make_recording({{0, 0.5, 0.5, true}});
    CHECK(gaze_csv_string(rec) == "t_ms,x,y,valid\n0.000000,0.500000,0.500000,1\n");
}

TEST_CASE("gaze CSV: read-write canonical identity and value round trip") {
    std::mt19937_64 gen(11);
    for (int i = 0; i < 100; ++i) {
        GazeRecording rec = testsupport::random_recording(gen, 40, 0.1);
        TempDir dir("gaze_rt");
        const auto p1 = dir.path() / "a.csv";
        const auto p2 = dir.path() / "b.csv";
        write_gaze_csv(rec, p1);
        const GazeRecording back = read_gaze_csv(p1);
        REQUIRE(back.samples.size() == rec.samples.size());
        for (std::size_t k = 0; k < rec.samples.size(); ++k) {
            CHECK(back.samples[k].t_ms == Catch::Approx(rec.samples[k].t_ms).margin(1e-6));
            CHECK(back.samples[k].x == Catch::Approx(rec.samples[k].x).margin(1e-6));
            CHECK(back.samples[k].y == Catch::Approx(rec.samples[k].y).margin(1e-6));
            CHECK(back.samples[k].valid == rec.samples[k].valid);
        }
        // a canonically formatted file survives read->write byte-identically
        write_gaze_csv(back, p2);
        CHECK(read_file(p1) == read_file(p2));
    }
}

TEST_CASE("AOI document: parse, schema violations, write round trip") {
    TempDir dir("aoi");
    const auto path = dir.path() / "aoi.json";

    SECTION("single Eyes region") {
        atomic_write_file(path,
                          R"({"stimulus_id":"s","regions":[{"zone":"Eyes","rects":[[0.30,0.25,0.70,0.40]]}]})");
        const AoiSet aoi = read_aoi_json(path);
        REQUIRE(aoi.regions.size() == 1);
        CHECK(aoi.regions[0].zone == ZoneLabel::Eyes);
        REQUIRE(aoi.regions[0].rects.size() == 1);
        CHECK(aoi.regions[0].rects[0].x_max == 0.70);
    }

    SECTION("misordered rect bounds") {
        atomic_write_file(path,
                          R"({"stimulus_id":"s","regions":[{"zone":"Eyes","rects":[[0.7,0.25,0.3,0.40]]}]})");
        CHECK_THROWS_AS(read_aoi_json(path), SchemaViolation);
    }

    SECTION("unknown zone name") {
        atomic_write_file(path,
                          R"({"stimulus_id":"s","regions":[{"zone":"Nose","rects":[[0.3,0.25,0.7,0.40]]}]})");
        CHECK_THROWS_AS(read_aoi_json(path), SchemaViolation);
    }

    SECTION("write-read-write is byte stable") {
        write_aoi_json(default_aoi(), path);
        const AoiSet back = read_aoi_json(path);
        const auto p2 = dir.path() / "aoi2.json";
        write_aoi_json(back, p2);
        CHECK(read_file(path) == read_file(p2));
    }
}

TEST_CASE("AOI document: duplicate zone entries merge at first priority") {
    TempDir dir("aoi_dup");
    const auto merged_path = dir.path() / "merged.json";
    atomic_write_file(merged_path, R"({"stimulus_id":"s","regions":[
        {"zone":"Eyes","rects":[[0.30,0.25,0.50,0.40]]},
        {"zone":"FaceOther","rects":[[0.20,0.10,0.80,0.80]]},
        {"zone":"Eyes","rects":[[0.50,0.25,0.70,0.40]]}]})");
    const AoiSet merged = read_aoi_json(merged_path);
    REQUIRE(merged.regions.size() == 2);
    CHECK(merged.regions[0].zone == ZoneLabel::Eyes);
    CHECK(merged.regions[0].rects.size() == 2);

    // equivalence against the hand-merged document on a coordinate grid
    AoiSet reference;
    reference.stimulus_id = "s";
    reference.regions = {{ZoneLabel::Eyes, {Rect{0.30, 0.25, 0.50, 0.40},
                                            Rect{0.50, 0.25, 0.70, 0.40}}},
                         {ZoneLabel::FaceOther, {Rect{0.20, 0.10, 0.80, 0.80}}}};
    for (int ix = 0; ix < 100; ++ix) {
        for (int iy = 0; iy < 100; ++iy) {
            const double x = (ix + 0.5) / 100.0;
            const double y = (iy + 0.5) / 100.0;
            REQUIRE(zone_of(x, y, merged) == zone_of(x, y, reference));
        }
    }
}

TEST_CASE("features CSV: parse and round trip") {
    TempDir dir("features");
    const auto path = dir.path() / "f.csv";

    SECTION("labeled row parses") {
        atomic_write_file(path,
                          "subject_id,label,f_eyes,f_mouth,f_face_other,f_body,f_objects\n"
                          "s1,TD,0.400000,0.200000,0.200000,0.100000,0.100000\n");
        const auto rows = read_features_csv(path);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].subject_id() == "s1");
        REQUIRE(rows[0].label().has_value());
        CHECK(*rows[0].label() == Label::TD);
        CHECK(rows[0].fraction(ZoneLabel::Eyes) == Catch::Approx(0.4).margin(1e-9));
    }

    SECTION("row summing to 0.90 violates the sum rule") {
        atomic_write_file(path,
                          "subject_id,label,f_eyes,f_mouth,f_face_other,f_body,f_objects\n"
                          "s1,TD,0.300000,0.200000,0.200000,0.100000,0.100000\n");
        CHECK_THROWS_AS(read_features_csv(path), RowSumViolation);
    }

    SECTION("write-read round trip preserves fractions to 1e-6") {
        std::mt19937_64 gen(3);
        std::vector<FeatureVector> rows;
        std::uniform_real_distribution<double> u(0.01, 1.0);
        for (int i = 0; i < 50; ++i) {
            std::array<double, kZoneCount> f{};
            double sum = 0.0;
            for (auto& v : f) sum += (v = u(gen));
            for (auto& v : f) v /= sum;
            rows.emplace_back(f, "s" + std::to_string(i),
                              i % 2 ? std::optional<Label>(Label::ASD)
                                    : std::optional<Label>(Label::TD));
        }
        write_features_csv(rows, path);
        const auto back = read_features_csv(path);
        REQUIRE(back.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t z = 0; z < kZoneCount; ++z) {
                CHECK(back[i].fractions()[z] ==
                      Catch::Approx(rows[i].fractions()[z]).margin(2e-6));
            }
        }
        // second write is byte-identical
        const auto p2 = dir.path() / "f2.csv";
        write_features_csv(back, p2);
        CHECK(read_file(path) == read_file(p2));
    }
}

TEST_CASE("manifest: round trip and duplicate detection") {
    TempDir dir("manifest");
    const auto path = dir.path() / "m.json";
    CohortManifest manifest;
    manifest.entries = {
        {"td_000", Label::TD, "td_000.csv", "face_default", Familiarity::Unknown},
        {"asd_000", Label::ASD, "asd_000.csv", "face_default", Familiarity::Known}};
    write_manifest_json(manifest, path);
    const CohortManifest back = read_manifest_json(path);
    REQUIRE(back.entries.size() == 2);
    CHECK(back.entries[1].label == Label::ASD);
    CHECK(back.entries[1].familiarity == Familiarity::Known);
    const auto p2 = dir.path() / "m2.json";
    write_manifest_json(back, p2);
    CHECK(read_file(path) == read_file(p2));

    manifest.entries.push_back(manifest.entries.front());
    CHECK_THROWS_AS(write_manifest_json(manifest, path), SchemaViolation);
}

TEST_CASE("atomic write leaves no partial file behind on success") {
    TempDir dir("atomic");
    const auto path = dir.path() / "out.txt";
    atomic_write_file(path, "payload");
    CHECK(read_file(path) == "payload");
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
}
