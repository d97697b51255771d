#pragma once

#include <string>
#include <vector>

#include "tlssc/errors.hpp"
#include "tlssc/trajectory.hpp"

namespace tlssc {

struct QualityReport {
    std::string group;
    std::size_t segment_count = 0;
    double distance_m = 0;
    double duration_s = 0;
    double anomaly_accel_pct_raw = 0;
    double anomaly_accel_pct_smoothed = 0;
    double anomaly_jerk_pct_raw = 0;
    double anomaly_jerk_pct_smoothed = 0;
};

// Normal ranges from the driving-data quality literature; values outside
// the closed interval count as anomalous.
inline constexpr double kAccelLo = -8.0, kAccelHi = 5.0;   // m/s^2
inline constexpr double kJerkLo = -15.0, kJerkHi = 15.0;   // m/s^3

inline std::size_t count_out_of_range(const std::vector<double>& xs, double lo, double hi) {
    std::size_t c = 0;
    for (double x : xs)
        if (x < lo || x > hi) ++c;
    return c;
}

inline double anomaly_pct(const std::vector<double>& xs, double lo, double hi) {
    if (xs.empty()) throw DataError("anomaly percentage of empty list");
    return 100.0 * static_cast<double>(count_out_of_range(xs, lo, hi)) / static_cast<double>(xs.size());
}

inline double anomaly_acceleration_pct(const std::vector<double>& accel, double lo = kAccelLo,
                                       double hi = kAccelHi) {
    return anomaly_pct(accel, lo, hi);
}

inline double anomaly_jerk_pct(const std::vector<double>& jerk, double lo = kJerkLo, double hi = kJerkHi) {
    return anomaly_pct(jerk, lo, hi);
}

enum class BehaviorGroup { Stopping, Accelerating, CarFollowing, All };

inline const char* to_string(BehaviorGroup g) {
    switch (g) {
        case BehaviorGroup::Stopping: return "Stopping behaviors";
        case BehaviorGroup::Accelerating: return "Accelerating behaviors";
        case BehaviorGroup::CarFollowing: return "Car-following behaviors";
        case BehaviorGroup::All: return "All behaviors";
    }
    return "?";
}

inline bool in_group(const BehaviorLabel& b, BehaviorGroup g) {
    switch (g) {
        case BehaviorGroup::Stopping: return b.is_stopping();
        case BehaviorGroup::Accelerating: return b.is_accelerating();
        case BehaviorGroup::CarFollowing: return b.is_following();
        case BehaviorGroup::All: return true;
    }
    return false;
}

// Pools anomaly counts over every sample in the group. "Raw" derives
// accel/jerk from the unsmoothed speed column; "smoothed" uses the
// Speed_smoothed column, falling back to this toolkit's own smoothing
// when the column is absent.
inline QualityReport summarize(const std::vector<TrajectorySegment>& segments, BehaviorGroup group,
                               int window_samples = 10) {
    QualityReport r;
    r.group = to_string(group);
    std::size_t accel_total = 0, accel_bad_raw = 0, accel_bad_sm = 0;
    std::size_t jerk_total = 0, jerk_bad_raw = 0, jerk_bad_sm = 0;
    for (const auto& seg : segments) {
        if (!in_group(seg.behavior, group)) continue;
        if (seg.points.size() < 3) continue;
        ++r.segment_count;
        r.duration_s += seg.duration();
        const TrajectorySegment* s = &seg;
        TrajectorySegment smoothed;
        if (!seg.points.front().speed_smoothed) {
            smoothed = smooth_segment(seg, window_samples);
            s = &smoothed;
        }
        auto raw = project_to_path(*s, SpeedChannel::Raw);
        auto sm = project_to_path(*s, SpeedChannel::Smoothed);
        r.distance_m += raw.position.back();
        accel_total += raw.accel.size();
        jerk_total += raw.jerk.size();
        accel_bad_raw += count_out_of_range(raw.accel, kAccelLo, kAccelHi);
        jerk_bad_raw += count_out_of_range(raw.jerk, kJerkLo, kJerkHi);
        accel_bad_sm += count_out_of_range(sm.accel, kAccelLo, kAccelHi);
        jerk_bad_sm += count_out_of_range(sm.jerk, kJerkLo, kJerkHi);
    }
    if (r.segment_count == 0) throw DataError(std::string("empty behavior group: ") + to_string(group));
    r.anomaly_accel_pct_raw = 100.0 * static_cast<double>(accel_bad_raw) / static_cast<double>(accel_total);
    r.anomaly_accel_pct_smoothed =
        100.0 * static_cast<double>(accel_bad_sm) / static_cast<double>(accel_total);
    r.anomaly_jerk_pct_raw = 100.0 * static_cast<double>(jerk_bad_raw) / static_cast<double>(jerk_total);
    r.anomaly_jerk_pct_smoothed =
        100.0 * static_cast<double>(jerk_bad_sm) / static_cast<double>(jerk_total);
    return r;
}

}  // namespace tlssc
