#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tlssc/direct.hpp"
#include "tlssc/errors.hpp"
#include "tlssc/fvdm.hpp"
#include "tlssc/trajectory.hpp"

namespace tlssc {

inline double speed_rmse(const std::vector<double>& simulated, const std::vector<double>& observed) {
    if (simulated.size() != observed.size())
        throw DataError("speed_rmse: length mismatch (" + std::to_string(simulated.size()) + " vs " +
                        std::to_string(observed.size()) + ")");
    if (simulated.empty()) throw DataError("speed_rmse: empty series");
    double ss = 0;
    for (std::size_t i = 0; i < simulated.size(); ++i) {
        double e = simulated[i] - observed[i];
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(simulated.size()));
}

struct Scenario {
    SimState init;
    LeaderSpec leader;
    LongitudinalSeries observed;
    double v_max;  // m/s, fixed from the segment's desired speed setting
    std::string id;
};

// Maps a labeled segment to its simulation setup: stopping behaviors get a
// stationary virtual leader at the projected stop line, accelerating
// behaviors a free virtual leader, car-following the recorded leader.
inline Scenario build_scenario(const TrajectorySegment& seg) {
    if (seg.desired_speed <= 0) throw DataError("build_scenario: segment lacks a desired speed");
    Scenario sc;
    sc.id = seg.id;
    sc.v_max = seg.desired_speed;
    sc.observed = project_to_path(seg);
    sc.init = {sc.observed.t.front(), sc.observed.position.front(), sc.observed.speed.front()};
    const auto& b = seg.behavior;
    if (b.is_stopping()) {
        if (!seg.annotation || !seg.annotation->stop_line_lat || !seg.annotation->stop_line_lon)
            throw DataError("build_scenario: stopping segment '" + seg.id +
                            "' missing stop-line annotation");
        // The comparison window for a stopping maneuver ends at the annotated
        // stop time: the stationary tail carries no information about the
        // approach dynamics and would only dilute the error.
        if (seg.annotation->stop_time) {
            auto& obs = sc.observed;
            std::size_t n = obs.size();
            while (n > 1 && obs.t[n - 1] > *seg.annotation->stop_time) --n;
            obs.t.resize(n);
            obs.position.resize(n);
            obs.speed.resize(n);
            if (!obs.accel.empty()) obs.accel.resize(n);
            if (!obs.jerk.empty()) obs.jerk.resize(n);
            if (!obs.lead_position.empty()) obs.lead_position.resize(n);
            if (!obs.lead_speed.empty()) obs.lead_speed.resize(n);
            if (!obs.spacing.empty()) obs.spacing.resize(n);
        }
        const auto& p0 = seg.points.front();
        double lat0 = p0.lat_smoothed.value_or(p0.lat);
        double lon0 = p0.lon_smoothed.value_or(p0.lon);
        double x_stop = sc.observed.position.front() +
                        haversine_m(lat0, lon0, *seg.annotation->stop_line_lat, *seg.annotation->stop_line_lon);
        sc.leader = VirtualStopped{x_stop};
    } else if (b.is_accelerating()) {
        sc.leader = VirtualFree{};
    } else {
        if (!sc.observed.has_leader())
            throw DataError("build_scenario: car-following segment '" + seg.id + "' missing leader");
        RecordedLeader lead;
        lead.t = sc.observed.t;
        lead.position = sc.observed.lead_position;
        lead.speed = sc.observed.lead_speed;
        sc.leader = std::move(lead);
    }
    return sc;
}

struct CalibrationProblem {
    std::vector<TrajectorySegment> segments;  // one behavior group
    // alpha, beta, s0, delta_s boxes
    std::vector<std::pair<double, double>> bounds = {{0, 5}, {0, 5}, {0, 10}, {0.1, 20}};
    OptimizerConfig optimizer;
    double dt = 0.1;
};

struct CalibrationResult {
    FvdmParams params;  // v_max reported as the group mean of per-segment settings
    double rmse = 0;    // m/s, pooled over segments
    int evals = 0;
    std::vector<double> per_segment_rmse;
};

namespace calib_detail {

inline double sample_linear(const std::vector<double>& t, const std::vector<double>& v, double at) {
    if (at <= t.front()) return v.front();
    if (at >= t.back()) return v.back();
    auto it = std::lower_bound(t.begin(), t.end(), at);
    std::size_t i = static_cast<std::size_t>(it - t.begin());
    if (i == 0) i = 1;
    double u = (at - t[i - 1]) / (t[i] - t[i - 1]);
    return v[i - 1] + u * (v[i] - v[i - 1]);
}

// Open-loop simulation over the whole segment, resampled at the
// observation timestamps. A virtual collision contributes a large
// penalty instead of aborting the search.
inline void segment_errors(const Scenario& sc, const FvdmParams& p, double dt, double& sum_sq,
                           std::size_t& count) {
    double horizon = sc.observed.t.back() - sc.observed.t.front();
    SimOutput sim = simulate(sc.init, sc.leader, p, dt, horizon);
    for (std::size_t i = 0; i < sc.observed.size(); ++i) {
        double at = sc.observed.t[i];
        double e;
        if (sim.collision && at > sim.collision_t) {
            e = 100.0;  // penalty per sample past the collision
        } else {
            e = calib_detail::sample_linear(sim.series.t, sim.series.speed, at) - sc.observed.speed[i];
        }
        sum_sq += e * e;
        ++count;
    }
}

}  // namespace calib_detail

// Pooled speed RMSE across all scenarios for one shared (alpha, beta, s0,
// delta_s); each segment keeps its own fixed v_max.
inline double pooled_objective(const std::vector<Scenario>& scenarios, const std::vector<double>& x,
                               double dt) {
    double sum_sq = 0;
    std::size_t count = 0;
    for (const auto& sc : scenarios) {
        FvdmParams p{x[0], x[1], x[2], x[3], sc.v_max};
        calib_detail::segment_errors(sc, p, dt, sum_sq, count);
    }
    return std::sqrt(sum_sq / static_cast<double>(count));
}

inline CalibrationResult calibrate(const CalibrationProblem& problem) {
    if (problem.segments.empty()) throw DataError("calibrate: no segments");
    std::vector<Scenario> scenarios;
    for (const auto& seg : problem.segments) scenarios.push_back(build_scenario(seg));

    auto objective = [&](const std::vector<double>& x) {
        return pooled_objective(scenarios, x, problem.dt);
    };
    MinimizeResult opt = minimize(objective, problem.bounds, problem.optimizer);

    CalibrationResult result;
    double vmax_sum = 0;
    for (const auto& sc : scenarios) vmax_sum += sc.v_max;
    result.params = {opt.x[0], opt.x[1], opt.x[2], opt.x[3],
                     vmax_sum / static_cast<double>(scenarios.size())};
    result.rmse = opt.f;
    result.evals = opt.evals;
    for (const auto& sc : scenarios) {
        double ss = 0;
        std::size_t cnt = 0;
        FvdmParams p{opt.x[0], opt.x[1], opt.x[2], opt.x[3], sc.v_max};
        calib_detail::segment_errors(sc, p, problem.dt, ss, cnt);
        result.per_segment_rmse.push_back(std::sqrt(ss / static_cast<double>(cnt)));
    }
    return result;
}

}  // namespace tlssc
