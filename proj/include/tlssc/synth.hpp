#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "tlssc/errors.hpp"
#include "tlssc/fvdm.hpp"
#include "tlssc/labels.hpp"
#include "tlssc/trajectory.hpp"
#include "tlssc/units.hpp"

namespace tlssc {

// Synthetic fixtures are laid along a due-north great-circle path from a
// fixed origin, so the haversine projection is exactly invertible.
inline constexpr double kSynthOriginLat = 43.07;
inline constexpr double kSynthOriginLon = -89.40;
inline constexpr int kSynthTzOffsetMin = -300;

inline double synth_lat_at(double x_m) {
    return kSynthOriginLat + (x_m / kEarthRadiusM) * (180.0 / M_PI);
}

inline double synth_epoch0() {
    static const double t0 = parse_iso8601("2024-06-01T10:00:00.000000000-05:00");
    return t0;
}

struct SynthOptions {
    double dt = 0.1;
    double hold_s = 8.0;        // dwell at each waypoint speed
    double ramp_accel = 1.5;    // m/s^2 magnitude between waypoints
    double noise_std = 0.0;     // m/s, Gaussian, speeds only
    unsigned long long seed = 0;
};

namespace synth_detail {

// Piecewise leader speed profile: hold each waypoint, ramp linearly at
// +-ramp_accel between them. Positions are trapezoid-integrated.
inline void leader_profile(const std::vector<double>& waypoints, const SynthOptions& opt,
                           std::vector<double>& t, std::vector<double>& v, std::vector<double>& x) {
    if (waypoints.empty()) throw DataError("synth: empty waypoint list");
    for (double w : waypoints)
        if (w <= 0) throw DataError("synth: waypoints must be positive");
    double time = 0;
    auto push = [&](double vi) {
        if (!t.empty()) {
            double dx = 0.5 * (v.back() + vi) * opt.dt;
            x.push_back(x.back() + dx);
        } else {
            x.push_back(0);
        }
        t.push_back(time);
        v.push_back(vi);
        time += opt.dt;
    };
    double cur = waypoints[0];
    int hold_steps = static_cast<int>(std::round(opt.hold_s / opt.dt));
    for (std::size_t w = 0; w < waypoints.size(); ++w) {
        double target = waypoints[w];
        while (std::abs(cur - target) > opt.ramp_accel * opt.dt) {
            cur += (target > cur ? 1 : -1) * opt.ramp_accel * opt.dt;
            push(cur);
        }
        cur = target;
        for (int k = 0; k < hold_steps; ++k) push(cur);
    }
}

inline void fill_geometry(TrajectoryPoint& p, double x, double speed) {
    p.lat = synth_lat_at(x);
    p.lon = kSynthOriginLon;
    p.speed = speed;
}

}  // namespace synth_detail

// Leader runs the waypoint speed profile; the follower is generated by the
// FVDM from near-equilibrium initial conditions. Output is a paired
// leader/follower segment in the standard file format.
inline TrajectorySegment synth_oscillation(const FvdmParams& params, const std::vector<double>& waypoints,
                                           const SynthOptions& opt = {}) {
    std::vector<double> lt, lv, lx;
    synth_detail::leader_profile(waypoints, opt, lt, lv, lx);
    double v0 = waypoints[0];
    double s_init = equilibrium_spacing(std::min(v0, 0.95 * params.v_max), params);

    RecordedLeader leader;
    // offset leader so the follower starts at x = 0
    leader.t = lt;
    leader.speed = lv;
    leader.position.reserve(lx.size());
    for (double xi : lx) leader.position.push_back(xi + s_init);

    double horizon = lt.back() - lt.front();
    SimOutput sim = simulate({0, 0, v0}, leader, params, opt.dt, horizon);
    if (sim.collision) throw DataError("synth: profile causes virtual collision");

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> noise(0.0, opt.noise_std);
    auto jitter = [&](double v) {
        return opt.noise_std > 0 ? std::max(0.0, v + noise(rng)) : v;
    };

    TrajectorySegment seg;
    seg.behavior = {BehaviorKind::StandardFollow, 4};
    seg.desired_speed = params.v_max;
    seg.tz_offset_minutes = kSynthTzOffsetMin;
    seg.id = "synth-oscillation";
    double t0 = synth_epoch0();
    for (std::size_t i = 0; i < sim.series.size(); ++i) {
        TrajectoryPoint p;
        p.t = t0 + sim.series.t[i];
        synth_detail::fill_geometry(p, sim.series.position[i], jitter(sim.series.speed[i]));
        p.lead_lat = synth_lat_at(sim.series.lead_position[i]);
        p.lead_lon = kSynthOriginLon;
        p.lead_speed = jitter(sim.series.lead_speed[i]);
        seg.points.push_back(p);
    }
    return seg;
}

struct StoppingFixture {
    TrajectorySegment segment;
    AnnotationRecord annotation;
};

// Approach at `approach_speed` toward a stop line `stopline_m` ahead;
// the follower is the FVDM with a stationary virtual leader.
inline StoppingFixture synth_stopping(const FvdmParams& params, double approach_speed, double stopline_m,
                                      double horizon_s = 60.0, const SynthOptions& opt = {}) {
    if (stopline_m <= 0) throw DataError("synth: stop line must be ahead of the start");
    SimOutput sim = simulate({0, 0, approach_speed}, VirtualStopped{stopline_m}, params, opt.dt, horizon_s);

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> noise(0.0, opt.noise_std);
    auto jitter = [&](double v) {
        return opt.noise_std > 0 ? std::max(0.0, v + noise(rng)) : v;
    };

    StoppingFixture fx;
    fx.segment.behavior = {BehaviorKind::StopSign, std::nullopt};
    fx.segment.desired_speed = params.v_max;
    fx.segment.tz_offset_minutes = kSynthTzOffsetMin;
    fx.segment.id = "synth-stopping";
    double t0 = synth_epoch0();
    for (std::size_t i = 0; i < sim.series.size(); ++i) {
        TrajectoryPoint p;
        p.t = t0 + sim.series.t[i];
        synth_detail::fill_geometry(p, sim.series.position[i], jitter(sim.series.speed[i]));
        fx.segment.points.push_back(p);
    }
    fx.annotation.stop_line_lat = synth_lat_at(stopline_m);
    fx.annotation.stop_line_lon = kSynthOriginLon;
    // Stop time = first sample at rest (below the motion threshold), or the
    // horizon end if the vehicle never comes to rest.
    double t_stop = sim.series.t.back();
    for (std::size_t i = 0; i < sim.series.size(); ++i) {
        if (sim.series.speed[i] < 0.3) { t_stop = sim.series.t[i]; break; }
    }
    fx.annotation.stop_time = t0 + t_stop;
    fx.segment.annotation = fx.annotation;
    return fx;
}

}  // namespace tlssc
