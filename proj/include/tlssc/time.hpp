#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "tlssc/errors.hpp"

namespace tlssc {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
inline std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y += m <= 2;
}

// Parses ISO 8601 with a mandatory zone designator ("Z" or +-HH:MM).
// Returns absolute time in seconds since the Unix epoch (UTC); the zone
// offset is reported separately so output can be written back in the
// original zone.
inline double parse_iso8601(const std::string& s, int& offset_minutes) {
    int y, mo, d, h, mi;
    double sec;
    int n = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%lf%n", &y, &mo, &d, &h, &mi, &sec, &n) != 6)
        throw StructuralError("unparseable ISO 8601 timestamp: " + s);
    std::string rest = s.substr(static_cast<std::size_t>(n));
    int off = 0;
    if (rest == "Z" || rest == "z") {
        off = 0;
    } else if (!rest.empty() && (rest[0] == '+' || rest[0] == '-')) {
        int oh = 0, om = 0;
        if (std::sscanf(rest.c_str() + 1, "%d:%d", &oh, &om) < 1)
            throw StructuralError("bad zone offset in timestamp: " + s);
        off = oh * 60 + om;
        if (rest[0] == '-') off = -off;
    } else {
        throw StructuralError("timestamp missing zone offset: " + s);
    }
    offset_minutes = off;
    double local = static_cast<double>(days_from_civil(y, mo, d)) * 86400.0 + h * 3600.0 + mi * 60.0 + sec;
    return local - off * 60.0;
}

inline double parse_iso8601(const std::string& s) {
    int off;
    return parse_iso8601(s, off);
}

// Formats epoch seconds back to ISO 8601 in the given zone offset, with
// nanosecond fractional digits so grid-aligned timestamps round-trip.
inline std::string format_iso8601(double epoch_s, int offset_minutes) {
    double local = epoch_s + offset_minutes * 60.0;
    std::int64_t day = static_cast<std::int64_t>(std::floor(local / 86400.0));
    double sod = local - static_cast<double>(day) * 86400.0;
    int h = static_cast<int>(sod / 3600.0);
    int mi = static_cast<int>((sod - h * 3600.0) / 60.0);
    double sec = sod - h * 3600.0 - mi * 60.0;
    if (sec > 59.9999999995) { sec = 0.0; if (++mi == 60) { mi = 0; if (++h == 24) { h = 0; ++day; } } }
    int y, mo, d;
    civil_from_days(day, y, mo, d);
    char buf[64];
    int oh = std::abs(offset_minutes) / 60, om = std::abs(offset_minutes) % 60;
    char sign = offset_minutes < 0 ? '-' : '+';
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%012.9f%c%02d:%02d", y, mo, d, h, mi, sec,
                  sign, oh, om);
    return buf;
}

}  // namespace tlssc
