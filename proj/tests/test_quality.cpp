#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "tlssc/quality.hpp"
#include "tlssc/synth.hpp"

using namespace tlssc;

TEST_CASE("anomaly_acceleration_pct arithmetic") {
    CHECK(anomaly_acceleration_pct({0, 1, -2, 4.9, -7.9}) == 0.0);
    std::vector<double> v(10, 0.0);
    v[3] = 6.0;
    CHECK(anomaly_acceleration_pct(v) == 10.0);
    SECTION("boundary value counts as normal (closed interval)") {
        CHECK(anomaly_acceleration_pct({5.0, -8.0}) == 0.0);
        CHECK(anomaly_acceleration_pct({5.0000001}) == 100.0);
    }
    SECTION("empty list is an error") {
        CHECK_THROWS_AS(anomaly_acceleration_pct({}), DataError);
    }
}

TEST_CASE("anomaly_jerk_pct arithmetic") {
    CHECK(anomaly_jerk_pct(std::vector<double>(50, 0.0)) == 0.0);
    std::vector<double> v(100, 1.0);
    v[10] = 20.0;
    v[90] = -20.0;
    CHECK(anomaly_jerk_pct(v) == 2.0);
}

TEST_CASE("anomaly percentage properties") {
    std::mt19937 rng(11);
    std::normal_distribution<double> g(0, 10);
    std::vector<double> v(500);
    for (auto& x : v) x = g(rng);

    SECTION("invariant under reordering") {
        auto shuffled = v;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(anomaly_jerk_pct(v) == anomaly_jerk_pct(shuffled));
    }
    SECTION("widening bounds never increases the percentage") {
        double narrow = anomaly_pct(v, -5, 5);
        double wide = anomaly_pct(v, -10, 10);
        CHECK(wide <= narrow);
    }
}

namespace {

TrajectorySegment noisy_stop_segment(unsigned seed, double noise_std) {
    FvdmParams p{0.7510, 0.8127, 5.5761, 18.9590, mph_to_mps(40)};
    SynthOptions opt;
    opt.noise_std = noise_std;
    opt.seed = seed;
    return synth_stopping(p, 15.0, 150.0, 40.0, opt).segment;
}

}  // namespace

TEST_CASE("smoothing reduces jerk anomalies on a noisy segment") {
    auto seg = noisy_stop_segment(3, 0.6);
    auto sm = smooth_segment(seg);
    auto raw_series = project_to_path(sm, SpeedChannel::Raw);
    auto sm_series = project_to_path(sm, SpeedChannel::Smoothed);
    double raw = anomaly_jerk_pct(raw_series.jerk);
    double smoothed = anomaly_jerk_pct(sm_series.jerk);
    CHECK(raw > 0.0);
    CHECK(smoothed < raw);
}

TEST_CASE("summarize on a constant-speed segment") {
    TrajectorySegment seg;
    seg.behavior = {BehaviorKind::StandardFollow, 4};
    double base = parse_iso8601("2024-06-01T10:00:00.0Z");
    for (int i = 0; i <= 100; ++i) {
        TrajectoryPoint p;
        p.t = base + i * 0.1;
        double x = 20.0 * i * 0.1;
        p.lat = synth_lat_at(x);
        p.lon = kSynthOriginLon;
        p.speed = 20.0;
        p.lead_lat = synth_lat_at(x + 30.0);
        p.lead_lon = kSynthOriginLon;
        p.lead_speed = 20.0;
        seg.points.push_back(p);
    }
    auto rep = summarize({seg}, BehaviorGroup::CarFollowing);
    CHECK(rep.segment_count == 1);
    CHECK(rep.duration_s == Catch::Approx(10.0));
    CHECK(rep.distance_m == Catch::Approx(200.0).margin(0.5));
    CHECK(rep.anomaly_accel_pct_raw == 0.0);
    CHECK(rep.anomaly_jerk_pct_raw == 0.0);
}

TEST_CASE("summarize pools counts across segments (brute-force oracle)") {
    std::vector<TrajectorySegment> segs;
    for (unsigned s = 0; s < 3; ++s) segs.push_back(noisy_stop_segment(s + 10, 0.5));
    auto pooled = summarize(segs, BehaviorGroup::All);

    std::size_t bad = 0, total = 0;
    for (const auto& seg : segs) {
        auto sm = smooth_segment(seg);
        auto raw = project_to_path(sm, SpeedChannel::Raw);
        bad += count_out_of_range(raw.jerk, kJerkLo, kJerkHi);
        total += raw.jerk.size();
    }
    double expect = 100.0 * static_cast<double>(bad) / static_cast<double>(total);
    CHECK(pooled.anomaly_jerk_pct_raw == Catch::Approx(expect).margin(1e-12));

    SECTION("pooled percentage lies within the per-segment range") {
        double lo = 100.0, hi = 0.0;
        for (const auto& seg : segs) {
            auto one = summarize({seg}, BehaviorGroup::All);
            lo = std::min(lo, one.anomaly_jerk_pct_raw);
            hi = std::max(hi, one.anomaly_jerk_pct_raw);
        }
        CHECK(pooled.anomaly_jerk_pct_raw >= lo - 1e-12);
        CHECK(pooled.anomaly_jerk_pct_raw <= hi + 1e-12);
    }
}

TEST_CASE("summarize rejects an empty group") {
    auto seg = noisy_stop_segment(1, 0.1);
    CHECK_THROWS_AS(summarize({seg}, BehaviorGroup::CarFollowing), DataError);
}
