#pragma once

#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tlssc/labels.hpp"
#include "tlssc/trajectory.hpp"

namespace tlssc {

inline constexpr double kCarFollowingThresholdM = 90.0;
inline constexpr double kMotionThresholdMps = 0.3;

enum class Mode { Following, PermissionStopping };

struct ModeDecision {
    Mode mode;
    std::optional<double> lead_distance;
    double threshold;
};

// Lead detected within the threshold -> car-following; otherwise the
// system falls back to permission-based stopping at the TCD. The boundary
// is inclusive by default (distance == threshold follows); pass
// inclusive=false to probe the exclusive side.
inline ModeDecision decide_mode(bool lead_present, double lead_distance = 0,
                                double threshold = kCarFollowingThresholdM, bool inclusive = true) {
    if (lead_present && lead_distance <= 0) throw DataError("decide_mode: lead_distance must be positive");
    bool within = inclusive ? lead_distance <= threshold : lead_distance < threshold;
    ModeDecision d{Mode::PermissionStopping, std::nullopt, threshold};
    if (lead_present) {
        d.lead_distance = lead_distance;
        if (within) d.mode = Mode::Following;
    }
    return d;
}

struct ReactionDelays {
    std::optional<double> green_to_motion;       // s
    std::optional<double> permission_to_motion;  // s
    bool green_unresolved = false;       // speed never exceeded the threshold after the anchor
    bool permission_unresolved = false;
};

inline ReactionDelays reaction_delays(const TrajectorySegment& seg, const AnnotationRecord& ann,
                                      double motion_threshold = kMotionThresholdMps) {
    if (seg.points.empty()) throw DataError("reaction_delays: empty segment");
    double t0 = seg.points.front().t, t1 = seg.points.back().t;
    if (ann.stop_time && ann.permission_time && *ann.permission_time < *ann.stop_time)
        throw DataError("annotation: permission_time precedes stop_time");
    auto check_span = [&](const std::optional<double>& ts, const char* name) {
        if (ts && (*ts < t0 - 1e-9 || *ts > t1 + 1e-9))
            throw DataError(std::string("annotation: ") + name + " outside segment span");
    };
    check_span(ann.green_time, "green_time");
    check_span(ann.permission_time, "permission_time");
    check_span(ann.stop_time, "stop_time");

    auto first_motion_after = [&](double anchor) -> std::optional<double> {
        for (const auto& p : seg.points)
            if (p.t >= anchor - 1e-9 && p.speed > motion_threshold) return p.t - anchor;
        return std::nullopt;
    };
    ReactionDelays d;
    if (ann.green_time) {
        d.green_to_motion = first_motion_after(*ann.green_time);
        d.green_unresolved = !d.green_to_motion.has_value();
    }
    if (ann.permission_time) {
        d.permission_to_motion = first_motion_after(*ann.permission_time);
        d.permission_unresolved = !d.permission_to_motion.has_value();
    }
    return d;
}

struct ConsistencyReport {
    bool pass = true;
    std::vector<std::string> reasons;

    void fail(std::string reason) {
        pass = false;
        reasons.push_back(std::move(reason));
    }
};

// Label-specific structural checks: stopping labels need a near-zero
// terminal plateau, AfterStop accelerating labels a stationary start, and
// car-following labels leader columns throughout.
inline ConsistencyReport validate_label(const TrajectorySegment& seg,
                                        double motion_threshold = kMotionThresholdMps) {
    ConsistencyReport rep;
    if (seg.points.empty()) {
        rep.fail("empty segment");
        return rep;
    }
    const auto& b = seg.behavior;
    if (b.is_stopping()) {
        // plateau: last second of samples below the motion threshold
        std::size_t n = seg.points.size();
        std::size_t plateau = std::min<std::size_t>(n, 10);
        bool ok = true;
        for (std::size_t i = n - plateau; i < n; ++i)
            if (seg.points[i].speed > motion_threshold) ok = false;
        if (!ok) rep.fail("no near-zero terminal speed plateau");
    }
    if (b.kind == BehaviorKind::AccelGreenAfterStop || b.kind == BehaviorKind::AccelStopSign) {
        if (seg.points.front().speed >= motion_threshold) rep.fail("nonzero initial speed");
    }
    if (b.is_following()) {
        std::string missing;
        int count = 0;
        for (const auto& p : seg.points)
            if (!p.has_leader()) {
                ++count;
                if (!missing.empty()) missing += ' ';
                missing += std::to_string(p.t);
            }
        if (count > 0) rep.fail("leaderless samples at t: " + missing);
    }
    if (b.gap_level && (*b.gap_level < 2 || *b.gap_level > 7)) rep.fail("gap level out of range");
    return rep;
}

// ---------------------------------------------------------------------------
// Annotation file format: one "key = value" pair per line, '#' comments.
// Keys: stop_time, green_time, permission_time (ISO 8601 with offset),
// stop_line_lat, stop_line_lon (decimal degrees).

inline AnnotationRecord parse_annotation(std::istream& in) {
    AnnotationRecord ann;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw RowError(lineno, "expected 'key = value'");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key == "stop_time") ann.stop_time = parse_iso8601(val);
        else if (key == "green_time") ann.green_time = parse_iso8601(val);
        else if (key == "permission_time") ann.permission_time = parse_iso8601(val);
        else if (key == "stop_line_lat") ann.stop_line_lat = detail::parse_number(val, lineno);
        else if (key == "stop_line_lon") ann.stop_line_lon = detail::parse_number(val, lineno);
        else throw RowError(lineno, "unknown annotation key: " + key);
    }
    return ann;
}

inline void serialize_annotation(const AnnotationRecord& ann, std::ostream& out, int tz_offset_minutes = 0) {
    if (ann.stop_time) out << "stop_time = " << format_iso8601(*ann.stop_time, tz_offset_minutes) << "\n";
    if (ann.green_time) out << "green_time = " << format_iso8601(*ann.green_time, tz_offset_minutes) << "\n";
    if (ann.permission_time)
        out << "permission_time = " << format_iso8601(*ann.permission_time, tz_offset_minutes) << "\n";
    if (ann.stop_line_lat) out << "stop_line_lat = " << detail::fmt_full(*ann.stop_line_lat) << "\n";
    if (ann.stop_line_lon) out << "stop_line_lon = " << detail::fmt_full(*ann.stop_line_lon) << "\n";
}

}  // namespace tlssc
