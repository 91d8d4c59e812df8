#pragma once

// Serial chain of pneumatic bladder links joined by Hilberry joints.
//
// Frame convention: each link frame sits at the far edge of the link's distal
// end cylinder, x along the link. Joint i rolls link i on the distal cylinder
// of link i-1 (the trestle cylinder for the first joint) about the local z
// axis of frame i-1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "inflatable_arm/errors.hpp"
#include "inflatable_arm/hilberry_joint.hpp"
#include "inflatable_arm/rigid_transform.hpp"
#include "inflatable_arm/tendon_routing.hpp"
#include "inflatable_arm/units.hpp"

namespace inflatable_arm {

/// Relation between the rotation axes of a link's two end cylinders.
enum class AxisRelation { parallel, orthogonal };

inline const char* to_string(AxisRelation a) noexcept {
  return a == AxisRelation::parallel ? "parallel" : "orthogonal";
}

struct LinkSpec {
  double length = table1::kLinkLength;    // L, excluding the end cylinders
  double diameter = table1::kJointDiameter;
  double height = table1::kLinkHeight;    // inflated height h
  double anchor = 0.5;                    // anchor ring position fraction
  double mass = table1::kLinkMass;
  AxisRelation axis = AxisRelation::parallel;

  /// Straight-line length of the link including both end cylinders.
  double straight_length() const noexcept { return length + diameter; }
};

/// Which tendons of the antagonistic pair are installed at a joint.
struct TendonSet {
  bool inner = true;
  bool outer = true;
};

/// Raw, unvalidated chain description (what a spec file or request carries).
struct ChainConfig {
  std::vector<LinkSpec> links;
  std::vector<double> joint_limits;  // rad, half-range per joint; empty = default for all
  Vec3 gravity{0.0, -kStandardGravity, 0.0};
  RigidTransform base_transform;
  std::optional<LinkSpec> base_link;  // trestle; defaults to a copy of the first link
  std::vector<TendonSet> tendons;     // empty = both tendons at every joint
};

/// Validated, immutable chain. Safe to share across threads.
class ChainSpec {
 public:
  explicit ChainSpec(ChainConfig config) {
    std::vector<FieldIssue> issues;
    validate(config, issues);
    if (!issues.empty()) throw InvalidSpecError(std::move(issues));
    const auto n = config.links.size();
    if (config.joint_limits.empty()) config.joint_limits.assign(n, table1::kRangeOfMotion);
    if (config.tendons.empty()) config.tendons.assign(n, TendonSet{});
    if (!config.base_link) config.base_link = config.links.front();
    config_ = std::move(config);
  }

  std::size_t size() const noexcept { return config_.links.size(); }
  const std::vector<LinkSpec>& links() const noexcept { return config_.links; }
  const LinkSpec& link(std::size_t i) const { return config_.links.at(i); }
  const LinkSpec& base_link() const noexcept { return *config_.base_link; }
  /// Link on the proximal side of joint i (the trestle for joint 0).
  const LinkSpec& proximal_link(std::size_t joint) const {
    return joint == 0 ? base_link() : link(joint - 1);
  }
  const std::vector<double>& joint_limits() const noexcept { return config_.joint_limits; }
  double joint_limit(std::size_t i) const { return config_.joint_limits.at(i); }
  const TendonSet& tendons(std::size_t i) const { return config_.tendons.at(i); }
  const Vec3& gravity() const noexcept { return config_.gravity; }
  const RigidTransform& base_transform() const noexcept { return config_.base_transform; }
  const ChainConfig& config() const noexcept { return config_; }

  /// Sum of straight link lengths; the reach of the zero pose.
  double straight_reach() const noexcept {
    double r = 0.0;
    for (const auto& l : config_.links) r += l.straight_length();
    return r;
  }

  /// Tendon geometry of joint i for the requested side.
  TendonJointGeometry tendon_geometry(std::size_t joint, TendonSide side) const {
    const auto& prox = proximal_link(joint);
    const auto& dist = link(joint);
    TendonJointGeometry g;
    g.proximal_length = prox.length;
    g.distal_length = dist.length;
    g.proximal_height = prox.height;
    g.distal_height = dist.height;
    g.proximal_anchor = prox.anchor;
    g.distal_anchor = dist.anchor;
    g.diameter = dist.diameter;
    g.side = side;
    g.angle_limit = joint_limit(joint);
    return g;
  }

  void check_angles(std::span<const double> angles) const {
    if (angles.size() != size()) throw DimensionError("joint angle vector", size(), angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i)
      check_joint_limit(angles[i], joint_limit(i), static_cast<int>(i));
  }

  static void validate(const ChainConfig& c, std::vector<FieldIssue>& issues) {
    if (c.links.empty()) {
      issues.push_back({"links", "chain needs at least one link"});
      return;
    }
    auto check_link = [&](const LinkSpec& l, const std::string& name) {
      if (!(l.length > 0.0)) issues.push_back({name + ".L_m", "must be > 0"});
      if (!(l.diameter > 0.0)) issues.push_back({name + ".D_m", "must be > 0"});
      if (!(l.height > 0.0)) issues.push_back({name + ".h_m", "must be > 0"});
      if (!(l.mass > 0.0)) issues.push_back({name + ".mass_kg", "must be > 0"});
      if (!(l.anchor >= 0.0 && l.anchor <= 1.0))
        issues.push_back({name + ".alpha", "must lie in [0, 1]"});
    };
    for (std::size_t i = 0; i < c.links.size(); ++i)
      check_link(c.links[i], "links[" + std::to_string(i) + "]");
    if (c.base_link) check_link(*c.base_link, "base_link");

    // Both cylinders of a joint share one diameter.
    const double d0 = c.base_link ? c.base_link->diameter : c.links.front().diameter;
    for (std::size_t i = 0; i < c.links.size(); ++i) {
      const double prev = i == 0 ? d0 : c.links[i - 1].diameter;
      if (c.links[i].diameter != prev)
        issues.push_back({"links[" + std::to_string(i) + "].D_m",
                          "end diameter differs from the mating cylinder"});
    }

    if (!c.joint_limits.empty()) {
      if (c.joint_limits.size() != c.links.size()) {
        issues.push_back({"limits_deg", "need one limit per joint"});
      } else {
        for (std::size_t i = 0; i < c.joint_limits.size(); ++i) {
          const double lim = c.joint_limits[i];
          if (!(lim > 0.0 && lim <= table1::kRangeOfMotion + 1e-12))
            issues.push_back({"limits_deg[" + std::to_string(i) + "]",
                              "must lie in (0, 150] degrees"});
        }
      }
    }
    if (!c.tendons.empty() && c.tendons.size() != c.links.size())
      issues.push_back({"tendons", "need one entry per joint"});
    if (!c.gravity.allFinite()) issues.push_back({"gravity", "must be finite"});
    if (!c.base_transform.is_proper() || !c.base_transform.translation.allFinite())
      issues.push_back({"base_transform", "rotation must be proper orthonormal"});
  }

 private:
  ChainConfig config_;
};

// ---------------------------------------------------------------------------
// Single link

namespace detail {

// Center of the link's proximal end cylinder, in frame i-1.
inline Vec3 proximal_cylinder_center(const LinkSpec& link, double angle) {
  const double d = link.diameter;
  return {-d / 2.0 + d * std::cos(angle / 2.0), d * std::sin(angle / 2.0), 0.0};
}

inline Vec3 link_direction(double angle) { return {std::cos(angle), std::sin(angle), 0.0}; }

}  // namespace detail

/// Tip of a link (far edge of its distal cylinder) in the frame of the
/// previous link tip.
inline Vec3 link_tip_offset(const LinkSpec& link, double angle,
                            double limit = table1::kRangeOfMotion) {
  check_joint_limit(angle, limit);
  const double d = link.diameter;
  const double reach = link.length + d / 2.0;
  return {-d / 2.0 + reach * std::cos(angle) + d * std::cos(angle / 2.0),
          reach * std::sin(angle) + d * std::sin(angle / 2.0), 0.0};
}

inline RigidTransform link_transform(const LinkSpec& link, double angle,
                                     double limit = table1::kRangeOfMotion) {
  RigidTransform t;
  t.translation = link_tip_offset(link, angle, limit);
  t.rotation = rot_z(angle);
  if (link.axis == AxisRelation::orthogonal) t.rotation = t.rotation * rot_x(kPi / 2.0);
  return t;
}

/// Point on the link centerline at distance `s` from its proximal edge, in
/// frame i-1. s = 0 is the rolling contact at zero angle, s = L + D the tip.
inline Vec3 link_point(const LinkSpec& link, double angle, double s) {
  return detail::proximal_cylinder_center(link, angle) +
         (s - link.diameter / 2.0) * detail::link_direction(angle);
}

/// Rolling-contact point of a joint in frame i-1.
inline Vec3 joint_contact_point(const LinkSpec& link, double angle, double limit) {
  const Point2 c = rotation_center(link.diameter, angle, limit);
  return {-link.diameter / 2.0 + c.x(), c.y(), 0.0};
}

// ---------------------------------------------------------------------------
// Chain kinematics

/// Cumulative base-frame transforms of every link tip; back() is the end effector.
inline std::vector<RigidTransform> forward_kinematics(const ChainSpec& chain,
                                                      std::span<const double> angles) {
  chain.check_angles(angles);
  std::vector<RigidTransform> frames;
  frames.reserve(chain.size());
  RigidTransform acc = chain.base_transform();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    acc = acc * link_transform(chain.link(i), angles[i], chain.joint_limit(i));
    frames.push_back(acc);
  }
  return frames;
}

inline Vec3 tip_position(const ChainSpec& chain, std::span<const double> angles) {
  return forward_kinematics(chain, angles).back().translation;
}

/// Frame in which joint i rotates (the previous link tip, or the base).
inline const RigidTransform& joint_frame(const ChainSpec& chain,
                                         const std::vector<RigidTransform>& frames,
                                         std::size_t joint) {
  return joint == 0 ? chain.base_transform() : frames.at(joint - 1);
}

struct JacobianResult {
  Eigen::Matrix<double, 3, Eigen::Dynamic> matrix;
  bool shifted_stencil = false;  // a joint was too close to its limit for a central difference
};

/// Finite-difference position Jacobian of the tip.
inline JacobianResult numeric_jacobian(const ChainSpec& chain, std::span<const double> angles,
                                       double step = 1e-6) {
  chain.check_angles(angles);
  const auto n = chain.size();
  JacobianResult out;
  out.matrix.resize(3, static_cast<Eigen::Index>(n));
  std::vector<double> q(angles.begin(), angles.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double lim = chain.joint_limit(i);
    double lo = angles[i] - step;
    double hi = angles[i] + step;
    if (hi > lim) {
      hi = angles[i];
      lo = angles[i] - 2.0 * step;
      out.shifted_stencil = true;
    } else if (lo < -lim) {
      lo = angles[i];
      hi = angles[i] + 2.0 * step;
      out.shifted_stencil = true;
    }
    q[i] = hi;
    const Vec3 p_hi = tip_position(chain, q);
    q[i] = lo;
    const Vec3 p_lo = tip_position(chain, q);
    q[i] = angles[i];
    out.matrix.col(static_cast<Eigen::Index>(i)) = (p_hi - p_lo) / (hi - lo);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inverse kinematics

struct IkOptions {
  double damping_fraction = 0.01;     // lambda = fraction * straight reach
  double max_step = deg2rad(10.0);    // per-iteration clamp on the joint update
  double tolerance = 1e-4;            // m
  int max_iterations = 200;           // per damped least-squares run
  double jacobian_step = 1e-6;
  double max_error_fraction = 0.1;    // task-space error clamp, fraction of straight reach
  // When the seeded run fails, restart from the `restarts` closest poses of
  // a coarse joint grid with `restart_grid` values per joint (0 disables).
  std::size_t restart_grid = 5;
  std::size_t restarts = 8;
};

struct IkResult {
  std::vector<double> angles;
  double residual = 0.0;  // m, |tip - target|
  bool converged = false;
  int iterations = 0;     // summed over all runs
};

namespace detail {

inline IkResult damped_least_squares(const ChainSpec& chain, const Vec3& target,
                                     std::vector<double> q, const IkOptions& opt) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  const double lambda = opt.damping_fraction * chain.straight_reach();
  const Mat3 damping = lambda * lambda * Mat3::Identity();
  const double max_error = opt.max_error_fraction * chain.straight_reach();

  Vec3 err = target - tip_position(chain, q);
  IkResult best{q, err.norm(), false, 0};
  for (int it = 0; it < opt.max_iterations && best.residual >= opt.tolerance; ++it) {
    const auto jac = numeric_jacobian(chain, q, opt.jacobian_step).matrix;
    const double e = err.norm();
    const Vec3 task = e > max_error ? Vec3(err * (max_error / e)) : err;
    const Vec3 y = (jac * jac.transpose() + damping).ldlt().solve(task);
    Eigen::VectorXd dq = jac.transpose() * y;
    const double largest = dq.cwiseAbs().maxCoeff();
    if (largest > opt.max_step) dq *= opt.max_step / largest;

    // Halve the update until the residual drops; a projected step that cannot
    // improve means a local optimum (typically an unreachable target).
    std::vector<double> trial(q.size());
    double r = best.residual;
    bool improved = false;
    for (int halving = 0; halving < 12 && !improved; ++halving, dq *= 0.5) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i);
        trial[j] = std::clamp(q[j] + dq(i), -chain.joint_limit(j), chain.joint_limit(j));
      }
      err = target - tip_position(chain, trial);
      r = err.norm();
      improved = r < best.residual;
    }
    best.iterations = it + 1;
    if (!improved) break;
    q = trial;
    best.angles = q;
    best.residual = r;
  }
  best.converged = best.residual < opt.tolerance;
  return best;
}

// Grid poses ordered by tip distance to the target, closest first.
inline std::vector<std::vector<double>> restart_seeds(const ChainSpec& chain, const Vec3& target,
                                                      const IkOptions& opt) {
  const std::size_t n = chain.size();
  const std::size_t per = opt.restart_grid;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n && total <= 100'000; ++i) total *= per;
  if (total > 100'000) return {};
  std::vector<std::pair<double, std::vector<double>>> scored;
  scored.reserve(total);
  std::vector<double> q(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t j = n; j-- > 0;) {
      const double lim = chain.joint_limit(j);
      q[j] = -lim + 2.0 * lim * static_cast<double>(rem % per) / static_cast<double>(per - 1);
      rem /= per;
    }
    scored.emplace_back((tip_position(chain, q) - target).norm(), q);
  }
  const auto keep = std::min(opt.restarts, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::vector<double>> seeds;
  for (std::size_t k = 0; k < keep; ++k) seeds.push_back(std::move(scored[k].second));
  return seeds;
}

}  // namespace detail

/// Position-only damped least-squares IK with joint limits enforced by
/// projection. The seeded run decides the branch whenever it converges;
/// otherwise grid restarts look for a better solution. Unreachable targets
/// return the closest pose found with converged = false.
inline IkResult solve_ik(const ChainSpec& chain, const Vec3& target, std::span<const double> seed,
                         const IkOptions& opt = {}) {
  if (!target.allFinite()) throw DomainError("solve_ik: target must be finite");
  chain.check_angles(seed);
  IkResult best =
      detail::damped_least_squares(chain, target, std::vector<double>(seed.begin(), seed.end()), opt);
  if (best.converged || opt.restart_grid < 2 || opt.restarts == 0) return best;

  int iterations = best.iterations;
  for (auto& q : detail::restart_seeds(chain, target, opt)) {
    auto r = detail::damped_least_squares(chain, target, std::move(q), opt);
    iterations += r.iterations;
    if (r.residual < best.residual) best = std::move(r);
    if (best.converged) break;
  }
  best.iterations = iterations;
  return best;
}

// ---------------------------------------------------------------------------
// Workspace sampling

struct AngleInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct WorkspaceCloud {
  std::size_t joints = 0;
  std::vector<Vec3> tips;
  std::vector<double> angles;  // row-major, `joints` entries per tip

  std::size_t size() const noexcept { return tips.size(); }
  std::span<const double> angles_of(std::size_t k) const {
    return {angles.data() + k * joints, joints};
  }
};

inline constexpr std::size_t kMaxWorkspacePoints = 10'000'000;

/// Tip positions over a Cartesian grid in joint space. The last joint varies
/// fastest. Output order is independent of scheduling.
inline WorkspaceCloud sample_workspace(const ChainSpec& chain,
                                       std::span<const AngleInterval> ranges,
                                       std::size_t resolution) {
  const auto n = chain.size();
  if (ranges.size() != n) throw DimensionError("workspace ranges", n, ranges.size());
  if (resolution < 2) throw DomainError("sample_workspace: resolution must be >= 2");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = ranges[i];
    if (!(r.lo <= r.hi)) throw DomainError("sample_workspace: range lo must not exceed hi");
    check_joint_limit(r.lo, chain.joint_limit(i), static_cast<int>(i));
    check_joint_limit(r.hi, chain.joint_limit(i), static_cast<int>(i));
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > kMaxWorkspacePoints / resolution)
      throw DomainError("sample_workspace: grid exceeds 1e7 points");
    total *= resolution;
  }

  WorkspaceCloud cloud;
  cloud.joints = n;
  cloud.tips.resize(total);
  cloud.angles.resize(total * n);
  const auto grid = [&](std::size_t joint, std::size_t k) {
    const auto& r = ranges[joint];
    if (k == resolution - 1) return r.hi;
    return r.lo + (r.hi - r.lo) * static_cast<double>(k) / static_cast<double>(resolution - 1);
  };
  std::vector<double> q(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t j = n; j-- > 0;) {
      q[j] = grid(j, rem % resolution);
      rem /= resolution;
    }
    cloud.tips[idx] = tip_position(chain, q);
    std::copy(q.begin(), q.end(), cloud.angles.begin() + static_cast<std::ptrdiff_t>(idx * n));
  }
  return cloud;
}

}  // namespace inflatable_arm
