#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "tlssc/behavior.hpp"
#include "tlssc/synth.hpp"

using namespace tlssc;

TEST_CASE("decide_mode threshold logic") {
    CHECK(decide_mode(true, 40.0).mode == Mode::Following);
    CHECK(decide_mode(true, 60.0).mode == Mode::Following);
    CHECK(decide_mode(true, 150.0).mode == Mode::PermissionStopping);
    CHECK(decide_mode(false).mode == Mode::PermissionStopping);
    SECTION("boundary inclusive by default, exclusive via flag") {
        CHECK(decide_mode(true, 90.0).mode == Mode::Following);
        CHECK(decide_mode(true, 90.0, 90.0, false).mode == Mode::PermissionStopping);
    }
    SECTION("monotone in distance") {
        for (double d = 1.0; d <= 90.0; d += 7.3) CHECK(decide_mode(true, d).mode == Mode::Following);
        for (double d = 90.5; d <= 300.0; d += 13.1)
            CHECK(decide_mode(true, d).mode == Mode::PermissionStopping);
    }
    SECTION("non-positive lead distance is an error") {
        CHECK_THROWS_AS(decide_mode(true, 0.0), DataError);
    }
}

namespace {

TrajectorySegment ramp_segment(double still_until, double total = 10.0) {
    TrajectorySegment seg;
    double base = synth_epoch0();
    for (int i = 0; i * 0.1 <= total; ++i) {
        TrajectoryPoint p;
        p.t = base + i * 0.1;
        double rel = i * 0.1;
        p.speed = rel < still_until ? 0.0 : (rel - still_until) * 4.0;
        p.lat = 43.0;
        p.lon = -89.4;
        seg.points.push_back(p);
    }
    return seg;
}

}  // namespace

TEST_CASE("reaction_delays") {
    double base = synth_epoch0();
    SECTION("already moving at the anchor gives zero delay") {
        auto seg = ramp_segment(0.0);
        for (auto& p : seg.points) p.speed = 5.0;
        AnnotationRecord ann;
        ann.green_time = base + 2.0;
        auto d = reaction_delays(seg, ann);
        REQUIRE(d.green_to_motion.has_value());
        CHECK(*d.green_to_motion == Catch::Approx(0.0).margin(1e-9));
    }
    SECTION("0.8 s permission-to-motion on a constructed fixture") {
        auto seg = ramp_segment(3.8);  // motion starts 0.8 s after the 3.0 s anchor
        AnnotationRecord ann;
        ann.permission_time = base + 3.0;
        auto d = reaction_delays(seg, ann);
        REQUIRE(d.permission_to_motion.has_value());
        CHECK(*d.permission_to_motion == Catch::Approx(0.8).margin(0.11));
    }
    SECTION("speed never exceeding the threshold is unresolved, not an exception") {
        auto seg = ramp_segment(100.0);  // never moves within the segment
        AnnotationRecord ann;
        ann.green_time = base + 1.0;
        auto d = reaction_delays(seg, ann);
        CHECK(d.green_unresolved);
        CHECK_FALSE(d.green_to_motion.has_value());
    }
    SECTION("permission before stop is an invariant violation") {
        auto seg = ramp_segment(1.0);
        AnnotationRecord ann;
        ann.stop_time = base + 5.0;
        ann.permission_time = base + 2.0;
        CHECK_THROWS_AS(reaction_delays(seg, ann), DataError);
    }
    SECTION("invariant to prepending stationary samples before the anchors") {
        auto seg = ramp_segment(3.8, 10.0);
        AnnotationRecord ann;
        ann.permission_time = base + 3.0;
        auto d1 = reaction_delays(seg, ann);

        TrajectorySegment padded;
        for (int i = 20; i >= 1; --i) {
            TrajectoryPoint p;
            p.t = base - i * 0.1;
            p.speed = 0.0;
            p.lat = 43.0;
            p.lon = -89.4;
            padded.points.push_back(p);
        }
        for (const auto& p : seg.points) padded.points.push_back(p);
        auto d2 = reaction_delays(padded, ann);
        CHECK(*d1.permission_to_motion == *d2.permission_to_motion);
    }
}

TEST_CASE("validate_label") {
    SECTION("stop segment ending at a near-zero plateau passes") {
        FvdmParams p{0.7510, 0.8127, 5.5761, 18.9590, mph_to_mps(40)};
        auto seg = synth_stopping(p, 15.0, 150.0, 60.0).segment;
        CHECK(validate_label(seg).pass);
    }
    SECTION("after-stop accel label starting at speed fails") {
        auto seg = ramp_segment(0.0);
        for (auto& p : seg.points) p.speed = 8.0;
        seg.behavior = {BehaviorKind::AccelGreenAfterStop, std::nullopt};
        auto rep = validate_label(seg);
        CHECK_FALSE(rep.pass);
        REQUIRE_FALSE(rep.reasons.empty());
        CHECK(rep.reasons[0] == "nonzero initial speed");
    }
    SECTION("car-following label with leaderless samples fails and lists times") {
        auto seg = ramp_segment(0.0, 1.0);
        seg.behavior = {BehaviorKind::StandardFollow, 4};
        for (std::size_t i = 0; i < seg.points.size(); ++i) {
            if (i == 2 || i == 5 || i == 7) continue;  // leave 3 leaderless
            seg.points[i].lead_lat = 43.001;
            seg.points[i].lead_lon = -89.4;
            seg.points[i].lead_speed = 3.0;
        }
        auto rep = validate_label(seg);
        CHECK_FALSE(rep.pass);
        REQUIRE(rep.reasons.size() == 1);
        CHECK(rep.reasons[0].find(std::to_string(seg.points[2].t)) != std::string::npos);
    }
}

TEST_CASE("annotation files round-trip") {
    AnnotationRecord ann;
    double base = synth_epoch0();
    ann.stop_time = base + 12.3;
    ann.green_time = base + 20.0;
    ann.permission_time = base + 21.5;
    ann.stop_line_lat = 43.071234;
    ann.stop_line_lon = -89.401;
    std::ostringstream out;
    serialize_annotation(ann, out, -300);
    std::istringstream in(out.str());
    auto ann2 = parse_annotation(in);
    CHECK(*ann2.stop_time == *ann.stop_time);
    CHECK(*ann2.green_time == *ann.green_time);
    CHECK(*ann2.permission_time == *ann.permission_time);
    CHECK(*ann2.stop_line_lat == *ann.stop_line_lat);
    CHECK(*ann2.stop_line_lon == *ann.stop_line_lon);
}

TEST_CASE("parse_annotation rejects unknown keys") {
    std::istringstream in("stopline = 43\n");
    CHECK_THROWS_AS(parse_annotation(in), RowError);
}
