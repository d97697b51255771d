#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tlssc/errors.hpp"
#include "tlssc/labels.hpp"
#include "tlssc/time.hpp"

namespace tlssc {

inline constexpr double kEarthRadiusM = 6371000.0;

inline double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    const double rad = M_PI / 180.0;
    double dphi = (lat2 - lat1) * rad;
    double dlam = (lon2 - lon1) * rad;
    double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
               std::cos(lat1 * rad) * std::cos(lat2 * rad) * std::sin(dlam / 2) * std::sin(dlam / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

struct TrajectoryPoint {
    double t = 0;  // epoch seconds
    double lat = 0, lon = 0;
    double speed = 0;  // m/s
    std::optional<double> lat_smoothed, lon_smoothed, speed_smoothed;
    std::optional<double> lead_lat, lead_lon, lead_speed;
    std::optional<double> lead_lat_smoothed, lead_lon_smoothed, lead_speed_smoothed;
    std::optional<double> elevation, instrument_height, bearing;
    std::optional<double> horizontal_accuracy, vertical_accuracy, pdop, hdop, vdop;

    bool has_leader() const { return lead_lat && lead_lon && lead_speed; }
};

struct TrajectorySegment {
    std::vector<TrajectoryPoint> points;
    BehaviorLabel behavior{BehaviorKind::StandardFollow, 4};
    double desired_speed = 0;  // m/s
    double dt_nominal = 0.1;
    int tz_offset_minutes = 0;
    std::optional<AnnotationRecord> annotation;
    std::string id;

    double duration() const {
        return points.size() < 2 ? 0.0 : points.back().t - points.front().t;
    }
};

struct LongitudinalSeries {
    std::vector<double> t;
    std::vector<double> position;  // m, cumulative along path
    std::vector<double> speed;     // m/s
    std::vector<double> accel;     // m/s^2
    std::vector<double> jerk;      // m/s^3
    // Leader channels, empty when the segment has no leader.
    std::vector<double> lead_position;
    std::vector<double> lead_speed;
    std::vector<double> spacing;

    std::size_t size() const { return t.size(); }
    bool has_leader() const { return !lead_position.empty(); }
};

// ---------------------------------------------------------------------------
// CSV plumbing

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_number(const std::string& s, std::size_t line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw RowError(line, "unparseable number: '" + s + "'");
    }
}

inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Maps Table-2-style column names onto point fields. The default schema
// accepts both the plain and the "_follow" column spellings.
using ColumnSchema = std::map<std::string, std::optional<double> TrajectoryPoint::*>;

inline const ColumnSchema& default_optional_columns() {
    static const ColumnSchema schema = {
        {"Longitude_smoothed", &TrajectoryPoint::lon_smoothed},
        {"Latitude_smoothed", &TrajectoryPoint::lat_smoothed},
        {"Longitude_follow_smoothed", &TrajectoryPoint::lon_smoothed},
        {"Latitude_follow_smoothed", &TrajectoryPoint::lat_smoothed},
        {"Speed_smoothed", &TrajectoryPoint::speed_smoothed},
        {"Longitude_lead", &TrajectoryPoint::lead_lon},
        {"Latitude_lead", &TrajectoryPoint::lead_lat},
        {"Speed_lead", &TrajectoryPoint::lead_speed},
        {"Longitude_lead_smoothed", &TrajectoryPoint::lead_lon_smoothed},
        {"Latitude_lead_smoothed", &TrajectoryPoint::lead_lat_smoothed},
        {"Speed_lead_smoothed", &TrajectoryPoint::lead_speed_smoothed},
        {"Elevation", &TrajectoryPoint::elevation},
        {"Instrument_height", &TrajectoryPoint::instrument_height},
        {"Bearing", &TrajectoryPoint::bearing},
        {"Horizontal_accuracy", &TrajectoryPoint::horizontal_accuracy},
        {"Vertical_accuracy", &TrajectoryPoint::vertical_accuracy},
        {"PDOP", &TrajectoryPoint::pdop},
        {"HDOP", &TrajectoryPoint::hdop},
        {"VDOP", &TrajectoryPoint::vdop},
    };
    return schema;
}

// Reads one delimited-text segment. Lines starting with '#' before the
// header are treated as metadata and skipped. Smoothed columns are kept
// separate from raw ones; they are never substituted for missing raw data.
inline TrajectorySegment parse_segment(std::istream& in,
                                       const ColumnSchema& extra = default_optional_columns()) {
    std::string line;
    std::size_t lineno = 0;
    // metadata / comment prefix
    std::string header;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '#') continue;
        header = line;
        break;
    }
    if (header.empty()) throw SchemaError("empty input: no header row");
    auto cols = detail::split_csv(header);
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < cols.size(); ++i) index[cols[i]] = static_cast<int>(i);

    auto find_col = [&](std::initializer_list<const char*> names) -> int {
        for (const char* n : names)
            if (auto it = index.find(n); it != index.end()) return it->second;
        return -1;
    };
    int ci_time = find_col({"Time"});
    int ci_lon = find_col({"Longitude", "Longitude_follow"});
    int ci_lat = find_col({"Latitude", "Latitude_follow"});
    int ci_speed = find_col({"Speed", "Speed_follow"});
    if (ci_time < 0) throw SchemaError("missing mandatory column: Time");
    if (ci_lon < 0) throw SchemaError("missing mandatory column: Longitude");
    if (ci_lat < 0) throw SchemaError("missing mandatory column: Latitude");
    if (ci_speed < 0) throw SchemaError("missing mandatory column: Speed");

    std::vector<std::pair<int, std::optional<double> TrajectoryPoint::*>> opt_cols;
    for (const auto& [name, field] : extra)
        if (auto it = index.find(name); it != index.end()) opt_cols.emplace_back(it->second, field);

    TrajectorySegment seg;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto f = detail::split_csv(line);
        if (f.size() < cols.size()) throw RowError(lineno, "expected " + std::to_string(cols.size()) +
                                                               " fields, got " + std::to_string(f.size()));
        TrajectoryPoint p;
        int off;
        try {
            p.t = parse_iso8601(f[static_cast<std::size_t>(ci_time)], off);
        } catch (const StructuralError& e) {
            throw RowError(lineno, e.what());
        }
        if (first) seg.tz_offset_minutes = off;
        p.lon = detail::parse_number(f[static_cast<std::size_t>(ci_lon)], lineno);
        p.lat = detail::parse_number(f[static_cast<std::size_t>(ci_lat)], lineno);
        p.speed = detail::parse_number(f[static_cast<std::size_t>(ci_speed)], lineno);
        for (auto [ci, field] : opt_cols) {
            const std::string& cell = f[static_cast<std::size_t>(ci)];
            if (!cell.empty()) p.*field = detail::parse_number(cell, lineno);
        }
        if (!first && p.t <= seg.points.back().t)
            throw StructuralError("non-monotone time at line " + std::to_string(lineno));
        seg.points.push_back(p);
        first = false;
    }
    return seg;
}

// Writes the Table-2-shaped output, with derived columns appended when a
// projected series is supplied. `meta` lines are emitted as '#' comments.
inline void serialize_segment(const TrajectorySegment& seg, std::ostream& out,
                              const LongitudinalSeries* derived = nullptr,
                              const std::vector<std::string>& meta = {}) {
    for (const auto& m : meta) out << "# " << m << "\n";
    bool leader = !seg.points.empty() && seg.points.front().has_leader();
    bool smoothed = !seg.points.empty() && seg.points.front().speed_smoothed.has_value();
    bool lead_smoothed = !seg.points.empty() && seg.points.front().lead_speed_smoothed.has_value();
    out << "Time,Longitude,Latitude,Speed";
    if (smoothed) out << ",Longitude_smoothed,Latitude_smoothed,Speed_smoothed";
    if (leader) out << ",Longitude_lead,Latitude_lead,Speed_lead";
    if (lead_smoothed) out << ",Longitude_lead_smoothed,Latitude_lead_smoothed,Speed_lead_smoothed";
    if (derived) {
        out << ",Position_m,Accel_mps2,Jerk_mps3";
        if (derived->has_leader()) out << ",Spacing_m";
    }
    out << "\n";
    for (std::size_t i = 0; i < seg.points.size(); ++i) {
        const auto& p = seg.points[i];
        out << format_iso8601(p.t, seg.tz_offset_minutes) << ',' << detail::fmt_full(p.lon) << ','
            << detail::fmt_full(p.lat) << ',' << detail::fmt_full(p.speed);
        if (smoothed)
            out << ',' << detail::fmt_full(*p.lon_smoothed) << ',' << detail::fmt_full(*p.lat_smoothed)
                << ',' << detail::fmt_full(*p.speed_smoothed);
        if (leader)
            out << ',' << detail::fmt_full(*p.lead_lon) << ',' << detail::fmt_full(*p.lead_lat) << ','
                << detail::fmt_full(*p.lead_speed);
        if (lead_smoothed)
            out << ',' << detail::fmt_full(*p.lead_lon_smoothed) << ','
                << detail::fmt_full(*p.lead_lat_smoothed) << ',' << detail::fmt_full(*p.lead_speed_smoothed);
        if (derived && i < derived->size()) {
            out << ',' << detail::fmt_full(derived->position[i]) << ','
                << detail::fmt_full(derived->accel[i]) << ',' << detail::fmt_full(derived->jerk[i]);
            if (derived->has_leader()) out << ',' << detail::fmt_full(derived->spacing[i]);
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Gap interpolation

struct GapReport {
    double t_before = 0;  // last sample before the hole
    double t_after = 0;   // first sample after
    double length() const { return t_after - t_before; }
};

struct InterpolationResult {
    // Contiguous pieces after splitting at oversized gaps; a single piece
    // when no gap exceeded max_gap.
    std::vector<TrajectorySegment> segments;
    std::vector<GapReport> oversized_gaps;
};

namespace detail {

inline TrajectoryPoint lerp_point(const TrajectoryPoint& a, const TrajectoryPoint& b, double t) {
    double u = (t - a.t) / (b.t - a.t);
    TrajectoryPoint p;
    p.t = t;
    p.lat = a.lat + u * (b.lat - a.lat);
    p.lon = a.lon + u * (b.lon - a.lon);
    p.speed = a.speed + u * (b.speed - a.speed);
    auto li = [&](const std::optional<double>& x, const std::optional<double>& y) -> std::optional<double> {
        if (x && y) return *x + u * (*y - *x);
        return std::nullopt;
    };
    p.lead_lat = li(a.lead_lat, b.lead_lat);
    p.lead_lon = li(a.lead_lon, b.lead_lon);
    p.lead_speed = li(a.lead_speed, b.lead_speed);
    return p;
}

}  // namespace detail

// Fills holes up to max_gap with linear interpolation at dt_nominal;
// larger holes split the segment and are reported with their bounding
// timestamps rather than bridged.
inline InterpolationResult interpolate_gaps(const TrajectorySegment& seg, double max_gap = 1.0) {
    if (max_gap <= seg.dt_nominal)
        throw DataError("max_gap must exceed dt_nominal");
    InterpolationResult res;
    TrajectorySegment cur = seg;
    cur.points.clear();
    const double dt = seg.dt_nominal;
    for (std::size_t i = 0; i < seg.points.size(); ++i) {
        if (!cur.points.empty()) {
            const auto& prev = cur.points.back();
            double gap = seg.points[i].t - prev.t;
            if (gap > max_gap + 1e-9) {
                res.oversized_gaps.push_back({prev.t, seg.points[i].t});
                res.segments.push_back(cur);
                cur.points.clear();
            } else if (gap > 1.5 * dt) {
                int missing = static_cast<int>(std::round(gap / dt)) - 1;
                for (int k = 1; k <= missing; ++k)
                    cur.points.push_back(detail::lerp_point(prev, seg.points[i], prev.t + k * dt));
            }
        }
        cur.points.push_back(seg.points[i]);
    }
    if (!cur.points.empty()) res.segments.push_back(cur);
    return res;
}

// ---------------------------------------------------------------------------
// Smoothing and differentiation

// Symmetric-window mean centered at each index: window_samples = N in the
// 10 Hz / 1 s convention, i.e. the window spans [i - N/2, i + N/2]. Near
// the edges the window shrinks to the in-range indices.
inline std::vector<double> moving_average(const std::vector<double>& series, int window_samples = 10) {
    if (series.empty()) throw DataError("moving_average: empty series");
    if (window_samples < 1) throw DataError("moving_average: window must be >= 1");
    const int half = window_samples / 2;
    const int n = static_cast<int>(series.size());
    std::vector<double> out(series.size());
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
        double sum = 0;
        for (int k = lo; k <= hi; ++k) sum += series[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(i)] = sum / (hi - lo + 1);
    }
    return out;
}

// Applies the moving average to latitude, longitude and speed (follower and
// leader) and stores the results in the *_smoothed fields.
inline TrajectorySegment smooth_segment(const TrajectorySegment& seg, int window_samples = 10) {
    if (seg.points.empty()) throw DataError("smooth_segment: empty segment");
    TrajectorySegment out = seg;
    const std::size_t n = seg.points.size();
    auto extract = [&](auto getter) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = getter(seg.points[i]);
        return v;
    };
    auto lat = moving_average(extract([](const TrajectoryPoint& p) { return p.lat; }), window_samples);
    auto lon = moving_average(extract([](const TrajectoryPoint& p) { return p.lon; }), window_samples);
    auto spd = moving_average(extract([](const TrajectoryPoint& p) { return p.speed; }), window_samples);
    for (std::size_t i = 0; i < n; ++i) {
        out.points[i].lat_smoothed = lat[i];
        out.points[i].lon_smoothed = lon[i];
        out.points[i].speed_smoothed = spd[i];
    }
    if (seg.points.front().has_leader()) {
        auto llat = moving_average(extract([](const TrajectoryPoint& p) { return p.lead_lat.value(); }),
                                   window_samples);
        auto llon = moving_average(extract([](const TrajectoryPoint& p) { return p.lead_lon.value(); }),
                                   window_samples);
        auto lspd = moving_average(extract([](const TrajectoryPoint& p) { return p.lead_speed.value(); }),
                                   window_samples);
        for (std::size_t i = 0; i < n; ++i) {
            out.points[i].lead_lat_smoothed = llat[i];
            out.points[i].lead_lon_smoothed = llon[i];
            out.points[i].lead_speed_smoothed = lspd[i];
        }
    }
    return out;
}

// Central differences at interior points, one-sided at the endpoints.
inline std::vector<double> differentiate(const std::vector<double>& series, double dt) {
    if (series.size() < 3) throw DataError("differentiate: need at least 3 samples");
    if (dt <= 0) throw DataError("differentiate: dt must be positive");
    const std::size_t n = series.size();
    std::vector<double> out(n);
    out[0] = (series[1] - series[0]) / dt;
    out[n - 1] = (series[n - 1] - series[n - 2]) / dt;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (series[i + 1] - series[i - 1]) / (2 * dt);
    return out;
}

// ---------------------------------------------------------------------------
// Longitudinal projection

enum class SpeedChannel { Raw, Smoothed };

// Cumulative haversine arclength along the vehicle's own fix chain.
// Spacing is the haversine distance between the paired fixes (single-lane
// following, so the leader sits on the same path); leader position is the
// follower position plus spacing.
inline LongitudinalSeries project_to_path(const TrajectorySegment& seg,
                                          SpeedChannel channel = SpeedChannel::Smoothed) {
    if (seg.points.size() < 2) throw DataError("project_to_path: need at least 2 points");
    const std::size_t n = seg.points.size();
    bool use_smoothed = channel == SpeedChannel::Smoothed && seg.points.front().speed_smoothed.has_value();
    auto lat_of = [&](const TrajectoryPoint& p) { return use_smoothed ? *p.lat_smoothed : p.lat; };
    auto lon_of = [&](const TrajectoryPoint& p) { return use_smoothed ? *p.lon_smoothed : p.lon; };
    auto speed_of = [&](const TrajectoryPoint& p) { return use_smoothed ? *p.speed_smoothed : p.speed; };

    LongitudinalSeries s;
    s.t.resize(n);
    s.position.resize(n);
    s.speed.resize(n);
    s.position[0] = 0;
    for (std::size_t i = 0; i < n; ++i) {
        s.t[i] = seg.points[i].t;
        s.speed[i] = speed_of(seg.points[i]);
        if (i > 0)
            s.position[i] = s.position[i - 1] + haversine_m(lat_of(seg.points[i - 1]), lon_of(seg.points[i - 1]),
                                                            lat_of(seg.points[i]), lon_of(seg.points[i]));
    }
    double dt = seg.duration() / static_cast<double>(n - 1);
    if (n >= 3) {
        s.accel = differentiate(s.speed, dt);
        s.jerk = differentiate(s.accel, dt);
    } else {
        s.accel.assign(n, 0.0);
        s.jerk.assign(n, 0.0);
    }
    if (seg.points.front().has_leader()) {
        bool lead_smoothed = use_smoothed && seg.points.front().lead_speed_smoothed.has_value();
        s.lead_position.resize(n);
        s.lead_speed.resize(n);
        s.spacing.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = seg.points[i];
            double llat = lead_smoothed ? *p.lead_lat_smoothed : *p.lead_lat;
            double llon = lead_smoothed ? *p.lead_lon_smoothed : *p.lead_lon;
            double lspd = lead_smoothed ? *p.lead_speed_smoothed : *p.lead_speed;
            double gap = haversine_m(lat_of(p), lon_of(p), llat, llon);
            if (gap <= 0 && seg.behavior.is_following())
                throw DataError("non-positive spacing at t=" + std::to_string(p.t));
            s.spacing[i] = gap;
            s.lead_position[i] = s.position[i] + gap;
            s.lead_speed[i] = lspd;
        }
    }
    return s;
}

}  // namespace tlssc
