#pragma once

// Stateful simulation sessions: rate-limited joint tracking toward joint or
// tip targets, with a full derived snapshot after every command.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "inflatable_arm/chain.hpp"
#include "inflatable_arm/errors.hpp"
#include "inflatable_arm/spec_json.hpp"
#include "inflatable_arm/statics.hpp"
#include "inflatable_arm/tendon_routing.hpp"
#include "inflatable_arm/units.hpp"

namespace inflatable_arm {

struct JointSnapshot {
  double moment_arm_inner = 0.0;  // m
  double moment_arm_outer = 0.0;  // m
  double pull_inner = 0.0;        // m, vs reference posture
  double pull_outer = 0.0;        // m
  JointActuation actuation;       // holding torque and tendon tensions
  bool within_force_limit = true;
};

struct IkStatus {
  bool active = false;  // a tip target has been commanded
  bool converged = true;
  double residual = 0.0;
  int iterations = 0;
};

struct RobotSnapshot {
  std::string session_id;
  double time = 0.0;  // s
  std::vector<double> angles;
  std::vector<double> targets;
  std::vector<RigidTransform> frames;
  Vec3 tip = Vec3::Zero();
  std::vector<JointSnapshot> joints;
  IkStatus ik;
  std::optional<Vec3> tip_target;
  double payload = 0.0;  // kg, held at the tip
  double motor_force_limit = std::numeric_limits<double>::infinity();
  double worst_force = 0.0;
  std::size_t worst_joint = 0;
  bool feasible = true;
};

namespace detail {

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Json degrees_json(const std::vector<double>& rad) {
  Json a = Json::array();
  for (double r : rad) a.push_back(rad2deg(r));
  return a;
}

}  // namespace detail

/// Wire form: angles in degrees, lengths in meters, forces in newtons.
inline Json to_json(const RobotSnapshot& s) {
  Json j;
  j["session_id"] = s.session_id;
  j["time_s"] = s.time;
  j["angles_deg"] = detail::degrees_json(s.angles);
  j["targets_deg"] = detail::degrees_json(s.targets);
  j["tip_m"] = detail::vec_json(s.tip);
  j["frames"] = Json::array();
  for (const auto& f : s.frames) {
    Json rot = Json::array();
    for (int r = 0; r < 3; ++r)
      rot.push_back({f.rotation(r, 0), f.rotation(r, 1), f.rotation(r, 2)});
    j["frames"].push_back({{"rotation", rot}, {"translation_m", detail::vec_json(f.translation)}});
  }
  j["joints"] = Json::array();
  for (const auto& js : s.joints) {
    const auto& a = js.actuation;
    j["joints"].push_back({
        {"moment_arm_inner_m", detail::finite_or_null(js.moment_arm_inner)},
        {"moment_arm_outer_m", detail::finite_or_null(js.moment_arm_outer)},
        {"tendon_pull_inner_m", js.pull_inner},
        {"tendon_pull_outer_m", js.pull_outer},
        {"gravity_torque_Nm", a.torque},
        {"active_tendon", to_string(a.tendon)},
        {"required_force_N", a.force()},
        {"inner_force_N", a.inner_force},
        {"outer_force_N", a.outer_force},
        {"feasible", a.feasible && js.within_force_limit},
    });
  }
  j["ik"] = {{"active", s.ik.active},
             {"converged", s.ik.converged},
             {"residual_m", s.ik.residual},
             {"iterations", s.ik.iterations}};
  j["tip_target_m"] = s.tip_target ? detail::vec_json(*s.tip_target) : Json(nullptr);
  j["payload_kg"] = s.payload;
  j["statics"] = {{"motor_force_limit_N", detail::finite_or_null(s.motor_force_limit)},
                  {"worst_joint", s.worst_joint + 1},
                  {"worst_force_N", detail::finite_or_null(s.worst_force)},
                  {"margin_N", detail::finite_or_null(s.motor_force_limit - s.worst_force)},
                  {"feasible", s.feasible}};
  return j;
}

/// One simulated arm. Commands are serialized by an internal mutex; the
/// returned snapshots are independent values.
class Session {
 public:
  Session(std::string id, const SessionRequest& req)
      : id_(std::move(id)),
        chain_(std::make_shared<const ChainSpec>(req.chain)),
        omega_max_(req.omega_max),
        motor_force_limit_(req.motor_force_limit) {
    if (!(omega_max_ > 0.0 && std::isfinite(omega_max_)))
      throw InvalidSpecError("omega_max_deg_s", "must be > 0");
    angles_ = req.initial_angles.empty() ? std::vector<double>(chain_->size(), 0.0)
                                         : req.initial_angles;
    if (angles_.size() != chain_->size())
      throw InvalidSpecError("initial_angles_deg", "need one angle per joint");
    for (std::size_t i = 0; i < angles_.size(); ++i) {
      const double lim = chain_->joint_limit(i);
      if (!std::isfinite(angles_[i]) || std::abs(angles_[i]) > lim)
        throw InvalidSpecError("initial_angles_deg[" + std::to_string(i) + "]",
                                 "outside joint limit of " + std::to_string(rad2deg(lim)) +
                                     " deg");
    }
    targets_ = angles_;
    reference_ = angles_;
  }

  const std::string& id() const noexcept { return id_; }
  const ChainSpec& chain() const noexcept { return *chain_; }
  double omega_max() const noexcept { return omega_max_; }

  void set_joint_targets(std::span<const double> targets) {
    chain_->check_angles(targets);
    std::lock_guard lock(mutex_);
    targets_.assign(targets.begin(), targets.end());
    ik_ = IkStatus{};
    tip_target_.reset();
  }

  /// Solves IK seeded with the current angles; unreachable targets keep the
  /// best-effort solution and report non-convergence.
  IkResult set_tip_target(const Vec3& target, double payload_kg) {
    if (!target.allFinite()) throw DomainError("tip target must be finite");
    if (!(payload_kg >= 0.0 && std::isfinite(payload_kg)))
      throw DomainError("payload must be a finite mass >= 0");
    std::lock_guard lock(mutex_);
    IkResult r = solve_ik(*chain_, target, angles_);
    targets_ = r.angles;
    ik_ = {true, r.converged, r.residual, r.iterations};
    tip_target_ = target;
    payload_ = payload_kg;
    return r;
  }

  RobotSnapshot step(double dt) {
    if (!(dt > 0.0 && dt <= 1.0)) throw DomainError("step: dt must lie in (0, 1] s");
    std::lock_guard lock(mutex_);
    const double max_move = omega_max_ * dt;
    for (std::size_t i = 0; i < angles_.size(); ++i) {
      const double delta = targets_[i] - angles_[i];
      angles_[i] = std::abs(delta) <= max_move ? targets_[i]
                                               : angles_[i] + std::copysign(max_move, delta);
    }
    clock_ += dt;
    return make_snapshot();
  }

  RobotSnapshot snapshot() const {
    std::lock_guard lock(mutex_);
    return make_snapshot();
  }

 private:
  RobotSnapshot make_snapshot() const {
    const ChainSpec& chain = *chain_;
    RobotSnapshot s;
    s.session_id = id_;
    s.time = clock_;
    s.angles = angles_;
    s.targets = targets_;
    s.frames = forward_kinematics(chain, angles_);
    s.tip = s.frames.back().translation;
    s.ik = ik_;
    s.tip_target = tip_target_;
    s.payload = payload_;
    s.motor_force_limit = motor_force_limit_;

    const Payload payload{payload_, chain.straight_reach()};
    const auto torques = gravity_torques(chain, angles_, payload);
    const auto actuation = required_tendon_forces(chain, angles_, torques);
    s.joints.resize(chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i) {
      auto& js = s.joints[i];
      const auto inner = chain.tendon_geometry(i, TendonSide::inner);
      const auto outer = chain.tendon_geometry(i, TendonSide::outer);
      try {
        js.moment_arm_inner = moment_arm(inner, angles_[i]);
      } catch (const DegenerateGeometryError&) {
        js.moment_arm_inner = std::numeric_limits<double>::quiet_NaN();
      }
      js.moment_arm_outer = moment_arm(outer, angles_[i]);
      js.pull_inner = tendon_pull(inner, reference_[i], angles_[i]);
      js.pull_outer = tendon_pull(outer, reference_[i], angles_[i]);
      js.actuation = actuation[i];
      const double f = js.actuation.feasible ? js.actuation.force()
                                             : std::numeric_limits<double>::infinity();
      js.within_force_limit = f <= motor_force_limit_;
      if (i == 0 || f > s.worst_force) {
        s.worst_force = f;
        s.worst_joint = i;
      }
      s.feasible = s.feasible && js.actuation.feasible && js.within_force_limit;
    }
    return s;
  }

  const std::string id_;
  const std::shared_ptr<const ChainSpec> chain_;
  const double omega_max_;
  const double motor_force_limit_;

  mutable std::mutex mutex_;
  std::vector<double> angles_;
  std::vector<double> targets_;
  std::vector<double> reference_;  // tendon lengths are measured against this posture
  double clock_ = 0.0;
  double payload_ = 0.0;
  std::optional<Vec3> tip_target_;
  IkStatus ik_;
};

/// Registry of independent sessions.
class SessionManager {
 public:
  using SnapshotSink = std::function<void(const RobotSnapshot&)>;

  /// `sink`, when set, receives every snapshot produced by step().
  explicit SessionManager(SnapshotSink sink = {}) : sink_(std::move(sink)) {}

  std::string create(const SessionRequest& req) {
    auto id = "s" + std::to_string(next_id_.fetch_add(1) + 1);
    auto session = std::make_shared<Session>(id, req);
    std::unique_lock lock(mutex_);
    sessions_.emplace(id, std::move(session));
    return id;
  }

  std::shared_ptr<Session> get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw UnknownSessionError(id);
    return it->second;
  }

  std::vector<std::string> ids() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : sessions_) out.push_back(id);
    return out;
  }

  RobotSnapshot step(const std::string& id, double dt) {
    auto snap = get(id)->step(dt);
    if (sink_) sink_(snap);
    return snap;
  }

  void step_all(double dt) {
    for (const auto& id : ids()) step(id, dt);
  }

 private:
  SnapshotSink sink_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::size_t> next_id_{0};
};

/// Appends one JSON snapshot per line to a file.
class SnapshotLog {
 public:
  explicit SnapshotLog(const std::string& path) : out_(path, std::ios::app) {
    if (!out_) throw Error("cannot open snapshot log '" + path + "'");
  }

  void write(const RobotSnapshot& s) {
    const auto line = to_json(s).dump();
    std::lock_guard lock(mutex_);
    out_ << line << '\n';
    out_.flush();
  }

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

}  // namespace inflatable_arm
