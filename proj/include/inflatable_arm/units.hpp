#pragma once

#include <cmath>
#include <numbers>

namespace inflatable_arm {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) noexcept { return rad * 180.0 / kPi; }

/// Length below which two points or a moment arm are treated as degenerate [m].
inline constexpr double kGeometryEpsilon = 1e-9;

inline constexpr double kStandardGravity = 9.81;

// Physical parameters of the fabricated arm (100 kPa inflation).
namespace table1 {
inline constexpr double kLinkMass = 0.15;           // kg
inline constexpr double kInternalPressure = 100e3;  // Pa
inline constexpr double kLinkLength = 0.330;        // m, excluding the cylindrical ends
inline constexpr double kLinkWidth = 0.160;         // m
inline constexpr double kLinkHeight = 0.160;        // m, maximum inflated height
inline constexpr double kJointDiameter = 0.080;     // m
inline constexpr double kRangeOfMotion = deg2rad(150.0);
inline constexpr double kMembraneThickness = 0.35e-3;  // m, tarpaulin
inline constexpr double kYoungsModulusLow = 320e6;     // Pa
inline constexpr double kYoungsModulusHigh = 560e6;    // Pa
}  // namespace table1

}  // namespace inflatable_arm
