#pragma once

#include <cmath>

namespace slowlight {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kHbar = 1.054571817e-34;            // J s
inline constexpr double kVacuumLightSpeed = 299792458.0;    // m/s

// All internal quantities are angular (rad/s). External interfaces quote
// frequencies and rates as value/2pi; these helpers live exactly at that
// boundary.
constexpr double hz_to_angular(double f_hz) { return kTwoPi * f_hz; }
constexpr double angular_to_hz(double omega) { return omega / kTwoPi; }
constexpr double mhz_to_angular(double f_mhz) { return kTwoPi * f_mhz * 1e6; }
constexpr double ghz_to_angular(double f_ghz) { return kTwoPi * f_ghz * 1e9; }

inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }
inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

}  // namespace slowlight
