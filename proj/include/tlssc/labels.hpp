#pragma once

#include <optional>
#include <string>

#include "tlssc/errors.hpp"

namespace tlssc {

enum class BehaviorKind {
    StopRedYellow,
    StopGreen,
    StopSign,
    AccelGreenBeforeStop,
    AccelGreenAfterStop,
    AccelStopSign,
    StandardFollow,
    IntersectionFollow,
};

struct BehaviorLabel {
    BehaviorKind kind;
    std::optional<int> gap_level;  // 2..7, car-following kinds only

    bool is_stopping() const {
        return kind == BehaviorKind::StopRedYellow || kind == BehaviorKind::StopGreen ||
               kind == BehaviorKind::StopSign;
    }
    bool is_accelerating() const {
        return kind == BehaviorKind::AccelGreenBeforeStop || kind == BehaviorKind::AccelGreenAfterStop ||
               kind == BehaviorKind::AccelStopSign;
    }
    bool is_following() const {
        return kind == BehaviorKind::StandardFollow || kind == BehaviorKind::IntersectionFollow;
    }
};

inline std::string to_string(const BehaviorLabel& b) {
    switch (b.kind) {
        case BehaviorKind::StopRedYellow: return "Stop before a red and yellow light";
        case BehaviorKind::StopGreen: return "Stop before a green light";
        case BehaviorKind::StopSign: return "Stop before a stop sign";
        case BehaviorKind::AccelGreenBeforeStop:
            return "Accelerate after permission at a green light (Before a stop)";
        case BehaviorKind::AccelGreenAfterStop:
            return "Accelerate after permission at a green light (After a stop)";
        case BehaviorKind::AccelStopSign: return "Accelerate after permission at a stop sign";
        case BehaviorKind::StandardFollow:
            return "Standard car-following behavior (Gap level " +
                   std::to_string(b.gap_level.value_or(0)) + ")";
        case BehaviorKind::IntersectionFollow:
            return "Car-following behavior when proceeding straight through the intersection (Gap level " +
                   std::to_string(b.gap_level.value_or(0)) + ")";
    }
    return "?";
}

// Short machine tokens used on the CLI and in fixture filenames.
inline BehaviorLabel parse_behavior_token(const std::string& tok) {
    auto gap = [&](const std::string& prefix) -> std::optional<int> {
        if (tok.size() <= prefix.size()) return std::nullopt;
        return std::stoi(tok.substr(prefix.size()));
    };
    if (tok == "stop-red-yellow") return {BehaviorKind::StopRedYellow, std::nullopt};
    if (tok == "stop-green") return {BehaviorKind::StopGreen, std::nullopt};
    if (tok == "stop-sign") return {BehaviorKind::StopSign, std::nullopt};
    if (tok == "accel-green-before-stop") return {BehaviorKind::AccelGreenBeforeStop, std::nullopt};
    if (tok == "accel-green-after-stop") return {BehaviorKind::AccelGreenAfterStop, std::nullopt};
    if (tok == "accel-stop-sign") return {BehaviorKind::AccelStopSign, std::nullopt};
    if (tok.rfind("follow-", 0) == 0) return {BehaviorKind::StandardFollow, gap("follow-")};
    if (tok.rfind("intersection-follow-", 0) == 0)
        return {BehaviorKind::IntersectionFollow, gap("intersection-follow-")};
    throw DataError("unknown behavior token: " + tok);
}

inline std::string behavior_token(const BehaviorLabel& b) {
    switch (b.kind) {
        case BehaviorKind::StopRedYellow: return "stop-red-yellow";
        case BehaviorKind::StopGreen: return "stop-green";
        case BehaviorKind::StopSign: return "stop-sign";
        case BehaviorKind::AccelGreenBeforeStop: return "accel-green-before-stop";
        case BehaviorKind::AccelGreenAfterStop: return "accel-green-after-stop";
        case BehaviorKind::AccelStopSign: return "accel-stop-sign";
        case BehaviorKind::StandardFollow:
            return "follow-" + std::to_string(b.gap_level.value_or(0));
        case BehaviorKind::IntersectionFollow:
            return "intersection-follow-" + std::to_string(b.gap_level.value_or(0));
    }
    return "?";
}

struct AnnotationRecord {
    std::optional<double> stop_time;        // epoch seconds
    std::optional<double> green_time;       // epoch seconds
    std::optional<double> permission_time;  // epoch seconds
    std::optional<double> stop_line_lat;    // degrees
    std::optional<double> stop_line_lon;    // degrees
};

}  // namespace tlssc
