#pragma once

#include "tlssc/behavior.hpp"
#include "tlssc/fvdm.hpp"

namespace tlssc {

struct ThresholdReplayConfig {
    double activation_distance_m = 40.0;
    double lead_speed = 0;        // m/s, constant cruise; defaults to desired
    double desired_speed = 0;     // m/s (v_max)
    double x_stopline_m = 200.0;  // ahead of the activation point
    double threshold_m = kCarFollowingThresholdM;
    bool threshold_inclusive = true;
    double dt = 0.1;
    double horizon_s = 90.0;
    FvdmParams following_params{0.0309, 3.4259, 9.8148, 19.6315, 0};  // gap level 7
    FvdmParams stopping_params{0.7510, 0.8127, 5.5761, 18.9590, 0};
};

struct ThresholdReplay {
    ModeDecision decision;
    SimOutput sim;
    double x_stopline;
    std::vector<double> time_headway;  // spacing / speed, s
};

// Replays an activation trial: the follower starts at its desired speed
// with a constant-speed leader `activation_distance_m` ahead. Detection
// within the threshold runs car-following behind the recorded leader;
// otherwise the system stops at the stop line with the stopping dynamics.
inline ThresholdReplay replay_threshold(const ThresholdReplayConfig& cfg) {
    if (cfg.desired_speed <= 0) throw DataError("replay_threshold: desired speed must be positive");
    ThresholdReplay out;
    out.x_stopline = cfg.x_stopline_m;
    out.decision = decide_mode(true, cfg.activation_distance_m, cfg.threshold_m, cfg.threshold_inclusive);
    double u = cfg.lead_speed > 0 ? cfg.lead_speed : cfg.desired_speed;
    SimState init{0, 0, cfg.desired_speed};
    if (out.decision.mode == Mode::Following) {
        FvdmParams p = cfg.following_params;
        p.v_max = cfg.desired_speed;
        RecordedLeader lead;
        for (double t = 0; t <= cfg.horizon_s + cfg.dt; t += cfg.dt) {
            lead.t.push_back(t);
            lead.speed.push_back(u);
            lead.position.push_back(cfg.activation_distance_m + u * t);
        }
        out.sim = simulate(init, lead, p, cfg.dt, cfg.horizon_s);
    } else {
        FvdmParams p = cfg.stopping_params;
        p.v_max = cfg.desired_speed;
        out.sim = simulate(init, VirtualStopped{cfg.x_stopline_m}, p, cfg.dt, cfg.horizon_s);
    }
    for (std::size_t i = 0; i < out.sim.series.size(); ++i) {
        double v = out.sim.series.speed[i];
        out.time_headway.push_back(v > 1e-6 ? out.sim.series.spacing[i] / v : 0.0);
    }
    return out;
}

}  // namespace tlssc
