#pragma once

// Geometry of a Hilberry rolling-contact joint: two cylindrical link ends of
// diameter D roll on each other, held together by crossed straps.

#include <cmath>

#include <Eigen/Core>

#include "inflatable_arm/errors.hpp"
#include "inflatable_arm/units.hpp"

namespace inflatable_arm {

using Point2 = Eigen::Vector2d;

struct JointGeometry {
  double diameter = table1::kJointDiameter;     // m
  double angle_limit = table1::kRangeOfMotion;  // rad, symmetric half-range

  void validate() const {
    if (!(diameter > 0.0)) throw DomainError("joint diameter must be positive");
    if (!(angle_limit > 0.0 && angle_limit <= kPi))
      throw DomainError("joint angle limit must lie in (0, pi]");
  }
};

/// Throws JointLimitError when |angle| exceeds `limit` (or is not finite).
inline void check_joint_limit(double angle, double limit, int joint = -1) {
  if (!std::isfinite(angle) || std::abs(angle) > limit) throw JointLimitError(angle, limit, joint);
}

/// Length of each constraint strap. The two wrapped arcs trade length as the
/// joint rolls, so the total is independent of the joint angle.
inline double strap_length(double diameter) {
  if (!(diameter >= 0.0)) throw DomainError("strap_length: diameter must be non-negative");
  return kPi * diameter / 2.0;
}

/// Instantaneous center of rotation, measured from the proximal end-cylinder
/// axis. It travels on a circle of radius D/2 at half the joint angle.
inline Point2 rotation_center(double diameter, double angle, double limit = table1::kRangeOfMotion) {
  if (!(diameter >= 0.0)) throw DomainError("rotation_center: diameter must be non-negative");
  check_joint_limit(angle, limit);
  const double half = angle / 2.0;
  return {diameter / 2.0 * std::cos(half), diameter / 2.0 * std::sin(half)};
}

inline Point2 rotation_center(const JointGeometry& joint, double angle) {
  joint.validate();
  return rotation_center(joint.diameter, angle, joint.angle_limit);
}

}  // namespace inflatable_arm
