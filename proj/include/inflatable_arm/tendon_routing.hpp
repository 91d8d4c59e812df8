#pragma once

// Tendon geometry across one Hilberry joint. Coordinates are in the joint
// frame whose origin is the instantaneous rotation center; x runs along the
// links at zero angle and +y is the inner (flexion) side.

#include <cmath>
#include <optional>

#include <Eigen/Core>

#include "inflatable_arm/errors.hpp"
#include "inflatable_arm/hilberry_joint.hpp"
#include "inflatable_arm/units.hpp"

namespace inflatable_arm {

enum class TendonSide { inner, outer };

inline const char* to_string(TendonSide side) noexcept {
  return side == TendonSide::inner ? "inner" : "outer";
}

struct TendonJointGeometry {
  double proximal_length = table1::kLinkLength;  // L1, link body without its ends
  double distal_length = table1::kLinkLength;    // L2
  double proximal_height = table1::kLinkHeight;  // h1, inflated height
  double distal_height = table1::kLinkHeight;    // h2
  double proximal_anchor = 0.5;                  // alpha1, anchor ring position fraction
  double distal_anchor = 0.5;                    // alpha2
  double diameter = table1::kJointDiameter;      // D
  TendonSide side = TendonSide::inner;
  double angle_limit = table1::kRangeOfMotion;

  void validate() const {
    if (!(proximal_length > 0.0 && distal_length > 0.0))
      throw DomainError("tendon geometry: link lengths must be positive");
    if (!(proximal_height > 0.0 && distal_height > 0.0))
      throw DomainError("tendon geometry: link heights must be positive");
    if (!(diameter > 0.0)) throw DomainError("tendon geometry: diameter must be positive");
    if (!(proximal_anchor >= 0.0 && proximal_anchor <= 1.0 && distal_anchor >= 0.0 &&
          distal_anchor <= 1.0))
      throw DomainError("tendon geometry: anchor fractions must lie in [0, 1]");
  }
};

struct AnchorPair {
  Point2 proximal;  // anchor ring on the front (proximal) link
  Point2 distal;    // anchor ring on the rear (distal) link
};

namespace detail {

// Anchor ring positions; `height_sign` = -1 reflects them onto the outer surface.
inline AnchorPair anchors(const TendonJointGeometry& g, double angle, double height_sign) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  const double h1 = height_sign * g.proximal_height / 2.0;
  const double h2 = height_sign * g.distal_height / 2.0;
  const double back = (1.0 - g.proximal_anchor) * g.proximal_length;
  const double fwd = g.distal_anchor * g.distal_length;
  return {
      Point2{-back * c - g.diameter / 2.0 + h1 * s, -back * s + h1 * c},
      Point2{fwd * c + g.diameter / 2.0 - h2 * s, fwd * s + h2 * c},
  };
}

}  // namespace detail

inline AnchorPair anchor_positions(const TendonJointGeometry& g, double angle) {
  g.validate();
  check_joint_limit(angle, g.angle_limit);
  return detail::anchors(g, angle, 1.0);
}

/// Perpendicular distance from the origin to the line through two anchors.
inline double chord_distance(const Point2& a, const Point2& b) {
  const double span = (a - b).norm();
  if (!(span > kGeometryEpsilon))
    throw DegenerateGeometryError("moment arm: anchor points coincide");
  return std::abs(a.x() * b.y() - a.y() * b.x()) / span;
}

/// Inner moment arm from the general anchor geometry. This is the value the
/// statics module uses.
inline double moment_arm_inner(const TendonJointGeometry& g, double angle) {
  const auto [a, b] = anchor_positions(g, angle);
  return chord_distance(a, b);
}

/// Published closed form for equal links with mid-length anchor rings. It
/// matches moment_arm_inner only at zero angle; kept as a separate quantity.
inline double moment_arm_inner_closed_form(double length, double height, double angle) {
  if (!(length >= 0.0 && height > 0.0))
    throw DomainError("moment_arm_inner_closed_form: need length >= 0 and height > 0");
  if (!std::isfinite(angle)) throw DomainError("moment_arm_inner_closed_form: angle not finite");
  return 0.5 * (length * std::sin(angle / 2.0) + height * std::cos(angle / 2.0));
}

/// Moment arm of a tendon running along the outside of the link.
/// Shrinks for negative angles; callers should flag that regime.
inline double moment_arm_outer(double height, double diameter, double angle,
                               double limit = table1::kRangeOfMotion) {
  if (!(height > 0.0 && diameter > 0.0))
    throw DomainError("moment_arm_outer: height and diameter must be positive");
  check_joint_limit(angle, limit);
  return 0.5 * (height + diameter * std::sin(angle / 2.0));
}

/// Moment arm for the side selected in `g`. The outer form takes the mean
/// of the two link heights.
inline double moment_arm(const TendonJointGeometry& g, double angle) {
  if (g.side == TendonSide::inner) return moment_arm_inner(g, angle);
  g.validate();
  return moment_arm_outer(0.5 * (g.proximal_height + g.distal_height), g.diameter, angle,
                          g.angle_limit);
}

inline double torque_from_force(double moment_arm, double force) {
  if (!(force >= 0.0)) throw DomainError("torque_from_force: a tendon can only pull (force >= 0)");
  if (!(moment_arm >= 0.0)) throw DomainError("torque_from_force: moment arm must be >= 0");
  return moment_arm * force;
}

/// Tension needed to produce `torque` through `moment_arm`. A negative torque
/// cannot be produced by a pulling tendon and yields std::nullopt.
inline std::optional<double> required_force(double torque, double moment_arm) {
  if (!(moment_arm > kGeometryEpsilon))
    throw DegenerateGeometryError("required_force: moment arm below epsilon");
  if (!std::isfinite(torque)) throw DomainError("required_force: torque not finite");
  if (torque < 0.0) return std::nullopt;
  return torque / moment_arm;
}

/// Straight-chord tendon length between the anchor rings. The outer path is
/// approximated by the chord between anchor images at height -h/2.
inline double tendon_path_length(const TendonJointGeometry& g, double angle) {
  g.validate();
  check_joint_limit(angle, g.angle_limit);
  const double sign = g.side == TendonSide::inner ? 1.0 : -1.0;
  const auto [a, b] = detail::anchors(g, angle, sign);
  return (a - b).norm();
}

/// Tendon length the reel must wind in going from `reference_angle` to
/// `angle` (positive = reeled in).
inline double tendon_pull(const TendonJointGeometry& g, double reference_angle, double angle) {
  return tendon_path_length(g, reference_angle) - tendon_path_length(g, angle);
}

}  // namespace inflatable_arm
