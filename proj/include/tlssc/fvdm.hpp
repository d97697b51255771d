#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <variant>

#include "tlssc/errors.hpp"
#include "tlssc/trajectory.hpp"

namespace tlssc {

struct FvdmParams {
    double alpha;    // 1/s, sensitivity to optimal-speed deviation
    double beta;     // 1/s, sensitivity to speed difference
    double s0;       // m, minimum desired spacing
    double delta_s;  // m, sensitivity spacing
    double v_max;    // m/s, maximum desired speed
};

// V(s) = v_max * tanh((s - s0) / delta_s), left unclamped: negative values
// below s0 are what drive the deceleration toward a stop.
inline double optimal_velocity(double s, const FvdmParams& p) {
    return p.v_max * std::tanh((s - p.s0) / p.delta_s);
}

inline double acceleration(double v, double v_lead, double s, const FvdmParams& p) {
    return p.alpha * (optimal_velocity(s, p) - v) + p.beta * (v_lead - v);
}

// Leader stimulus: a recorded trajectory, a stationary virtual leader at
// the stop line, or a virtual leader infinitely far ahead moving at v_max.
struct RecordedLeader {
    std::vector<double> t;         // epoch or relative seconds, increasing
    std::vector<double> position;  // m
    std::vector<double> speed;     // m/s

    void sample(double at, double& x, double& v) const {
        if (t.empty() || at < t.front() - 1e-9 || at > t.back() + 1e-9)
            throw DataError("recorded leader does not cover t=" + std::to_string(at));
        auto it = std::lower_bound(t.begin(), t.end(), at);
        std::size_t i = static_cast<std::size_t>(it - t.begin());
        if (i == 0) i = 1;
        if (i >= t.size()) i = t.size() - 1;
        double u = (at - t[i - 1]) / (t[i] - t[i - 1]);
        u = std::clamp(u, 0.0, 1.0);
        x = position[i - 1] + u * (position[i] - position[i - 1]);
        v = speed[i - 1] + u * (speed[i] - speed[i - 1]);
    }
};

struct VirtualStopped {
    double x_stopline;  // m, in the follower's longitudinal frame
};

struct VirtualFree {};

using LeaderSpec = std::variant<RecordedLeader, VirtualStopped, VirtualFree>;

struct SimState {
    double t = 0;
    double x = 0;  // m
    double v = 0;  // m/s
};

struct SimOutput {
    LongitudinalSeries series;
    bool collision = false;  // spacing <= 0 encountered; simulation halted there
    double collision_t = 0;
};

// Forward integration of the FVDM with semi-implicit Euler: the position
// update uses the already-updated speed. Speed is clamped at zero.
// VirtualFree holds the spacing input at s0 + 20*delta_s, where tanh is
// saturated to machine precision.
inline SimOutput simulate(SimState init, const LeaderSpec& leader, const FvdmParams& p, double dt = 0.1,
                          double horizon = 60.0) {
    if (dt <= 0) throw DataError("simulate: dt must be positive");
    if (horizon < dt) throw DataError("simulate: horizon must be at least dt");
    if (const auto* rec = std::get_if<RecordedLeader>(&leader)) {
        if (rec->t.size() < 2) throw DataError("simulate: recorded leader needs >= 2 samples");
        if (rec->t.back() < init.t + horizon - 1e-9)
            throw DataError("simulate: recorded leader shorter than horizon");
    }
    if (const auto* vs = std::get_if<VirtualStopped>(&leader)) {
        if (vs->x_stopline <= init.x) throw DataError("simulate: stop line behind initial position");
    }

    SimOutput out;
    auto& s = out.series;
    const std::size_t nsteps = static_cast<std::size_t>(std::llround(horizon / dt));
    double t = init.t, x = init.x, v = std::max(0.0, init.v);
    const double free_spacing = p.s0 + 20.0 * p.delta_s;

    auto leader_state = [&](double at, double follower_x, double& lx, double& lv) {
        if (const auto* rec = std::get_if<RecordedLeader>(&leader)) {
            rec->sample(at, lx, lv);
        } else if (const auto* stop = std::get_if<VirtualStopped>(&leader)) {
            lx = stop->x_stopline;
            lv = 0.0;
        } else {
            lx = follower_x + free_spacing;
            lv = p.v_max;
        }
    };

    for (std::size_t k = 0; k <= nsteps; ++k) {
        double lx, lv;
        leader_state(t, x, lx, lv);
        double spacing = lx - x;
        s.t.push_back(t);
        s.position.push_back(x);
        s.speed.push_back(v);
        s.lead_position.push_back(lx);
        s.lead_speed.push_back(lv);
        s.spacing.push_back(spacing);
        if (spacing <= 0) {
            out.collision = true;
            out.collision_t = t;
            break;
        }
        if (k == nsteps) break;
        double a = acceleration(v, lv, spacing, p);
        v = std::max(0.0, v + a * dt);
        x = x + v * dt;
        t = init.t + static_cast<double>(k + 1) * dt;
    }
    const std::size_t n = s.t.size();
    if (n >= 3) {
        s.accel = differentiate(s.speed, dt);
        s.jerk = differentiate(s.accel, dt);
    } else {
        s.accel.assign(n, 0.0);
        s.jerk.assign(n, 0.0);
    }
    return out;
}

// Equilibrium spacing for following a constant-speed leader at u < v_max.
inline double equilibrium_spacing(double u, const FvdmParams& p) {
    return p.s0 + p.delta_s * std::atanh(u / p.v_max);
}

}  // namespace tlssc
