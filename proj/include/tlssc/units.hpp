#pragma once

namespace tlssc {

inline constexpr double kMphToMps = 0.44704;

inline constexpr double mph_to_mps(double mph) { return mph * kMphToMps; }
inline constexpr double mps_to_mph(double mps) { return mps / kMphToMps; }

}  // namespace tlssc
