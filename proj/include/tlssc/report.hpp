#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "tlssc/calibration.hpp"
#include "tlssc/quality.hpp"

namespace tlssc {

struct CalibrationRow {
    std::string behavior;
    CalibrationResult result;
};

namespace report_detail {

inline std::string f4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline std::string f2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace report_detail

inline std::string format_calibration_table(const std::vector<CalibrationRow>& rows) {
    std::ostringstream out;
    out << "Behavior,alpha,beta,s0,delta_s,Speed RMSE (m/s)\n";
    for (const auto& r : rows) {
        using report_detail::f4;
        out << r.behavior << ',' << f4(r.result.params.alpha) << ',' << f4(r.result.params.beta) << ','
            << f4(r.result.params.s0) << ',' << f4(r.result.params.delta_s) << ',' << f4(r.result.rmse)
            << "\n";
    }
    return out.str();
}

inline std::string format_quality_table(const std::vector<QualityReport>& reports) {
    std::ostringstream out;
    out << "Behavior,Segments,Distance (m),Duration (s),"
           "Anomaly acceleration (%) raw/smoothed,Anomaly jerk (%) raw/smoothed\n";
    for (const auto& q : reports) {
        using report_detail::f2;
        out << q.group << ',' << q.segment_count << ',' << f2(q.distance_m) << ',' << f2(q.duration_s)
            << ',' << f2(q.anomaly_accel_pct_raw) << " / " << f2(q.anomaly_accel_pct_smoothed) << ','
            << f2(q.anomaly_jerk_pct_raw) << " / " << f2(q.anomaly_jerk_pct_smoothed) << "\n";
    }
    return out.str();
}

// Machine-readable key=value record block, one per result.
inline std::string format_structured(const std::vector<CalibrationRow>& rows,
                                     const std::vector<QualityReport>& quality) {
    std::ostringstream out;
    for (const auto& r : rows) {
        out << "[calibration]\n";
        out << "behavior = " << r.behavior << "\n";
        out << "alpha = " << r.result.params.alpha << "\n";
        out << "beta = " << r.result.params.beta << "\n";
        out << "s0 = " << r.result.params.s0 << "\n";
        out << "delta_s = " << r.result.params.delta_s << "\n";
        out << "v_max = " << r.result.params.v_max << "\n";
        out << "rmse = " << r.result.rmse << "\n";
        out << "evals = " << r.result.evals << "\n";
        out << "rmse_aggregation = pooled\n";
        out << "\n";
    }
    for (const auto& q : quality) {
        out << "[quality]\n";
        out << "group = " << q.group << "\n";
        out << "segments = " << q.segment_count << "\n";
        out << "distance_m = " << q.distance_m << "\n";
        out << "duration_s = " << q.duration_s << "\n";
        out << "anomaly_accel_pct_raw = " << q.anomaly_accel_pct_raw << "\n";
        out << "anomaly_accel_pct_smoothed = " << q.anomaly_accel_pct_smoothed << "\n";
        out << "anomaly_jerk_pct_raw = " << q.anomaly_jerk_pct_raw << "\n";
        out << "anomaly_jerk_pct_smoothed = " << q.anomaly_jerk_pct_smoothed << "\n";
        out << "\n";
    }
    return out.str();
}

}  // namespace tlssc
