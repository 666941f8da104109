#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "gazescreen/core.hpp"
#include "gazescreen/synth.hpp"
#include "test_support.hpp"

using namespace gazescreen;

TEST_CASE("validate_recording flags non-increasing timestamps") {
    auto rec = testsupport::make_recording({{0, 0.5, 0.5, true},
                                            {10, 0.5, 0.5, true},
                                            {10, 0.5, 0.5, true}});
    const auto violations = validate_recording(rec);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "non-increasing timestamp at index 2");
}

TEST_CASE("validate_recording accepts a well-formed recording") {
    auto rec = testsupport::stationary_recording(5, 0.5, 0.5);
    CHECK(validate_recording(rec).empty());
}

TEST_CASE("validate_recording flags out-of-range valid coordinates") {
    auto rec = testsupport::make_recording({{0, 0.5, 0.5, true}, {10, 1.2, 0.5, true}});
    const auto violations = validate_recording(rec);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "coordinate out of range at index 1");
}

TEST_CASE("validate_recording ignores coordinates of invalid samples") {
    auto rec = testsupport::make_recording({{0, 0.5, 0.5, true}, {10, 1.7, -2.0, false}});
    CHECK(validate_recording(rec).empty());
}

TEST_CASE("zone_of maps uncovered points to Objects") {
    AoiSet empty;
    empty.stimulus_id = "none";
    CHECK(zone_of(0.5, 0.5, empty) == ZoneLabel::Objects);
}

TEST_CASE("zone_of resolves overlap by region priority") {
    AoiSet aoi;
    aoi.regions = {{ZoneLabel::Eyes, {Rect{0.3, 0.25, 0.7, 0.4}}},
                   {ZoneLabel::FaceOther, {Rect{0.2, 0.1, 0.8, 0.8}}}};
    CHECK(zone_of(0.5, 0.3, aoi) == ZoneLabel::Eyes);
    CHECK(zone_of(0.5, 0.6, aoi) == ZoneLabel::FaceOther);
}

TEST_CASE("zone_of on the default template: far corner point is Objects") {
    // Independent check: (0.99, 0.99) against every shipped rectangle.
    const AoiSet aoi = default_aoi();
    bool contained = false;
    for (const auto& region : aoi.regions) {
        for (const auto& r : region.rects) {
            if (0.99 >= r.x_min && 0.99 <= r.x_max && 0.99 >= r.y_min && 0.99 <= r.y_max) {
                contained = true;
            }
        }
    }
    REQUIRE_FALSE(contained);
    CHECK(zone_of(0.99, 0.99, aoi) == ZoneLabel::Objects);
}

TEST_CASE("zone_of is total and within-zone rect order does not matter") {
    AoiSet aoi = default_aoi();
    AoiSet shuffled = aoi;
    for (auto& region : shuffled.regions) {
        std::reverse(region.rects.begin(), region.rects.end());
    }
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        const double x = u(gen), y = u(gen);
        const ZoneLabel z = zone_of(x, y, aoi);
        CHECK(static_cast<int>(z) >= 0);
        CHECK(static_cast<int>(z) < static_cast<int>(kZoneCount));
        CHECK(z == zone_of(x, y, shuffled));
    }
}

TEST_CASE("FeatureVector enforces the distribution invariant") {
    CHECK_NOTHROW(FeatureVector({0.4, 0.2, 0.2, 0.1, 0.1}, "ok"));
    CHECK_THROWS_AS(FeatureVector({0.4, 0.2, 0.2, 0.1, 0.2}, "bad_sum"), Error);
    CHECK_THROWS_AS(FeatureVector({1.2, -0.2, 0.0, 0.0, 0.0}, "bad_range"), Error);
    // within 1e-9 slack is accepted
    CHECK_NOTHROW(FeatureVector({0.4 + 4e-10, 0.2, 0.2, 0.1, 0.1}, "slack"));
}

TEST_CASE("rect validation rejects misordered bounds") {
    CHECK_THROWS_AS(validate_rect(Rect{0.7, 0.2, 0.3, 0.4}), SchemaViolation);
    CHECK_THROWS_AS(validate_rect(Rect{-0.1, 0.2, 0.3, 0.4}), SchemaViolation);
    CHECK_NOTHROW(validate_rect(Rect{0.3, 0.25, 0.7, 0.4}));
}
