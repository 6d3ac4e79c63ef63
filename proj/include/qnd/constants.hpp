#pragma once

// CODATA 2018 exact/recommended values, SI units.
namespace qnd::constants {

inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kSpeedOfLight = 299792458.0;   // m / s

}  // namespace qnd::constants
