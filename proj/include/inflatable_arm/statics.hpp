#pragma once

// Quasi-static loading: gravity holding torques, tendon tensions, lifting
// feasibility sweeps, and the thin-wall membrane elongation estimate.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "inflatable_arm/chain.hpp"
#include "inflatable_arm/errors.hpp"
#include "inflatable_arm/tendon_routing.hpp"
#include "inflatable_arm/units.hpp"

namespace inflatable_arm {

/// A point payload. `offset` is measured from the base joint's contact point
/// along the straightened chain centerline; offsets past the tip extend the
/// final link's axis rigidly.
struct Payload {
  double mass = 0.0;    // kg
  double offset = 0.0;  // m
};

struct LoadCase {
  Payload payload;
  std::vector<double> angles;  // pose, rad
};

struct StaticsOptions {
  bool link_masses = true;  // false treats every link as massless
};

namespace detail {

inline std::pair<std::size_t, double> locate_on_chain(const ChainSpec& chain, double offset) {
  double start = 0.0;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const double len = chain.link(k).straight_length();
    if (offset <= start + len || k + 1 == chain.size()) return {k, offset - start};
    start += len;
  }
  return {chain.size() - 1, offset - start};
}

}  // namespace detail

/// Static joint torques that balance gravity in the given pose, about each
/// joint's instantaneous rotation center. Positive means the joint must
/// drive toward increasing angle (the inner tendon's direction).
inline std::vector<double> gravity_torques(const ChainSpec& chain, std::span<const double> angles,
                                           const Payload& payload, const StaticsOptions& opt = {}) {
  if (!(payload.mass >= 0.0 && payload.offset >= 0.0))
    throw DomainError("gravity_torques: payload mass and offset must be >= 0");
  const auto frames = forward_kinematics(chain, angles);
  const auto n = chain.size();
  const Vec3& g = chain.gravity();

  struct PointMass {
    std::size_t link;
    Vec3 position;
    double mass;
  };
  std::vector<PointMass> masses;
  if (opt.link_masses) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto& l = chain.link(k);
      const Vec3 local = link_point(l, angles[k], l.straight_length() / 2.0);
      masses.push_back({k, joint_frame(chain, frames, k).apply(local), l.mass});
    }
  }
  if (payload.mass > 0.0) {
    const auto [k, s] = detail::locate_on_chain(chain, payload.offset);
    const Vec3 local = link_point(chain.link(k), angles[k], s);
    masses.push_back({k, joint_frame(chain, frames, k).apply(local), payload.mass});
  }

  std::vector<double> torques(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& frame = joint_frame(chain, frames, i);
    const Vec3 center =
        frame.apply(joint_contact_point(chain.link(i), angles[i], chain.joint_limit(i)));
    const Vec3 axis = frame.rotation.col(2);
    Vec3 moment = Vec3::Zero();
    for (const auto& pm : masses)
      if (pm.link >= i) moment += (pm.position - center).cross(pm.mass * g);
    torques[i] = -axis.dot(moment);
  }
  return torques;
}

inline std::vector<double> gravity_torques(const ChainSpec& chain, const LoadCase& load,
                                           const StaticsOptions& opt = {}) {
  return gravity_torques(chain, load.angles, load.payload, opt);
}

enum class ActiveTendon { none, inner, outer };

inline const char* to_string(ActiveTendon t) noexcept {
  switch (t) {
    case ActiveTendon::inner: return "inner";
    case ActiveTendon::outer: return "outer";
    default: return "none";
  }
}

struct JointActuation {
  double torque = 0.0;            // N*m, signed holding torque
  ActiveTendon tendon = ActiveTendon::none;
  double moment_arm = 0.0;        // m, of the active tendon (0 when none)
  double inner_force = 0.0;       // N
  double outer_force = 0.0;       // N
  bool feasible = true;

  /// Tension in whichever tendon carries the load.
  double force() const noexcept { return inner_force + outer_force; }
};

/// Tendon tensions that realize the given holding torques. Each joint is an
/// antagonistic pair: positive torque loads the inner tendon, negative the
/// outer; the slack tendon carries 0 N. A joint is infeasible when the loaded
/// side has no tendon installed or its moment arm is degenerate.
inline std::vector<JointActuation> required_tendon_forces(const ChainSpec& chain,
                                                          std::span<const double> angles,
                                                          std::span<const double> torques) {
  chain.check_angles(angles);
  if (torques.size() != chain.size())
    throw DimensionError("torque vector", chain.size(), torques.size());
  std::vector<JointActuation> out(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    auto& a = out[i];
    a.torque = torques[i];
    if (a.torque == 0.0) continue;
    const TendonSide side = a.torque > 0.0 ? TendonSide::inner : TendonSide::outer;
    a.tendon = side == TendonSide::inner ? ActiveTendon::inner : ActiveTendon::outer;
    const bool installed =
        side == TendonSide::inner ? chain.tendons(i).inner : chain.tendons(i).outer;
    if (!installed) {
      a.feasible = false;
      continue;
    }
    try {
      a.moment_arm = moment_arm(chain.tendon_geometry(i, side), angles[i]);
    } catch (const DegenerateGeometryError&) {
      a.moment_arm = 0.0;
    }
    if (!(a.moment_arm > kGeometryEpsilon)) {
      a.feasible = false;
      continue;
    }
    const double f = *required_force(std::abs(a.torque), a.moment_arm);
    (side == TendonSide::inner ? a.inner_force : a.outer_force) = f;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lifting feasibility

struct LiftSample {
  double angle = 0.0;  // rad, of the swept joint
  JointActuation actuation;
  bool within_limit = true;  // feasible and force <= motor limit
};

struct LiftReport {
  std::size_t joint = 0;
  double motor_force_limit = std::numeric_limits<double>::infinity();
  std::vector<LiftSample> samples;
  double worst_torque = 0.0;  // largest |torque|
  double worst_torque_angle = 0.0;
  double worst_force = 0.0;
  double worst_force_angle = 0.0;
  double margin = 0.0;        // motor limit minus worst force
  bool feasible = true;       // every sample within the limit
  std::vector<double> boundary_angles;  // refined angles where feasibility flips
};

namespace detail {

inline LiftSample lift_sample(const ChainSpec& chain, const LoadCase& load, std::size_t joint,
                              double angle, double limit, const StaticsOptions& opt) {
  std::vector<double> q = load.angles;
  q[joint] = angle;
  const auto torques = gravity_torques(chain, q, load.payload, opt);
  const auto act = required_tendon_forces(chain, q, torques);
  LiftSample s{angle, act[joint], true};
  s.within_limit = s.actuation.feasible && s.actuation.force() <= limit;
  return s;
}

}  // namespace detail

/// Sweeps one joint over `sweep` (others held at `load.angles`) and reports
/// the worst torque and tendon tension against the motor force limit.
inline LiftReport lift_feasibility(const ChainSpec& chain, const LoadCase& load,
                                   double motor_force_limit, AngleInterval sweep,
                                   std::size_t joint = 0, double sample_step = deg2rad(1.0),
                                   const StaticsOptions& opt = {}) {
  chain.check_angles(load.angles);
  if (joint >= chain.size()) throw DimensionError("lift joint index", chain.size(), joint);
  if (!(sweep.hi > sweep.lo)) throw DomainError("lift_feasibility: empty sweep");
  if (!(sample_step > 0.0)) throw DomainError("lift_feasibility: sample step must be > 0");
  if (!(motor_force_limit >= 0.0)) throw DomainError("lift_feasibility: negative force limit");
  check_joint_limit(sweep.lo, chain.joint_limit(joint), static_cast<int>(joint));
  check_joint_limit(sweep.hi, chain.joint_limit(joint), static_cast<int>(joint));

  LiftReport report;
  report.joint = joint;
  report.motor_force_limit = motor_force_limit;
  const auto count = static_cast<std::size_t>(std::ceil((sweep.hi - sweep.lo) / sample_step)) + 1;
  for (std::size_t k = 0; k < count; ++k) {
    const double a = k + 1 == count
                         ? sweep.hi
                         : sweep.lo + (sweep.hi - sweep.lo) * static_cast<double>(k) /
                                          static_cast<double>(count - 1);
    report.samples.push_back(detail::lift_sample(chain, load, joint, a, motor_force_limit, opt));
  }

  bool first = true;
  for (const auto& s : report.samples) {
    const double t = std::abs(s.actuation.torque);
    const double f = s.actuation.feasible ? s.actuation.force()
                                          : std::numeric_limits<double>::infinity();
    if (first || t > report.worst_torque) {
      report.worst_torque = t;
      report.worst_torque_angle = s.angle;
    }
    if (first || f > report.worst_force) {
      report.worst_force = f;
      report.worst_force_angle = s.angle;
    }
    report.feasible = report.feasible && s.within_limit;
    first = false;
  }
  report.margin = motor_force_limit - report.worst_force;

  for (std::size_t k = 1; k < report.samples.size(); ++k) {
    const auto& a = report.samples[k - 1];
    const auto& b = report.samples[k];
    if (a.within_limit == b.within_limit) continue;
    double lo = a.angle;
    double hi = b.angle;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const bool ok =
          detail::lift_sample(chain, load, joint, mid, motor_force_limit, opt).within_limit;
      (ok == a.within_limit ? lo : hi) = mid;
    }
    report.boundary_angles.push_back(0.5 * (lo + hi));
  }
  return report;
}

/// Key-value text rendering of a lift report (angles in degrees).
inline std::string to_text(const LiftReport& r) {
  std::ostringstream os;
  os.precision(9);
  os << "joint: " << r.joint + 1 << '\n'
     << "motor_force_limit_N: " << r.motor_force_limit << '\n'
     << "worst_torque_Nm: " << r.worst_torque << '\n'
     << "worst_torque_angle_deg: " << rad2deg(r.worst_torque_angle) << '\n'
     << "worst_force_N: " << r.worst_force << '\n'
     << "worst_force_angle_deg: " << rad2deg(r.worst_force_angle) << '\n'
     << "margin_N: " << r.margin << '\n'
     << "feasible: " << (r.feasible ? "true" : "false") << '\n';
  os << "boundary_angles_deg:";
  for (double a : r.boundary_angles) os << ' ' << rad2deg(a);
  os << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Membrane

struct MembraneSpec {
  double pressure = table1::kInternalPressure;  // Pa
  double radius = table1::kJointDiameter;       // m
  double youngs_modulus = table1::kYoungsModulusHigh;
  double thickness = table1::kMembraneThickness;

  void validate() const {
    if (!(pressure >= 0.0)) throw DomainError("membrane: pressure must be >= 0");
    if (!(radius > 0.0)) throw DomainError("membrane: radius must be > 0");
    if (!(thickness > 0.0)) throw DomainError("membrane: thickness must be > 0");
    if (!(youngs_modulus >= 1e6 && youngs_modulus <= 1e11))
      throw DomainError("membrane: Young's modulus outside [1e6, 1e11] Pa");
  }
};

/// Thin-wall radial elongation p r^2 / (E t).
inline double membrane_elongation(const MembraneSpec& m) {
  m.validate();
  return m.pressure * m.radius * m.radius / (m.youngs_modulus * m.thickness);
}

}  // namespace inflatable_arm
