#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace inflatable_arm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (negative length, NaN, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A joint angle outside its admissible range. Angles are never clamped silently.
class JointLimitError : public Error {
 public:
  JointLimitError(double value_rad, double limit_rad, int joint = -1)
      : Error(format(value_rad, limit_rad, joint)),
        value_(value_rad),
        limit_(limit_rad),
        joint_(joint) {}

  double value() const noexcept { return value_; }
  double limit() const noexcept { return limit_; }
  /// Zero-based joint index, or -1 when the check was not tied to a chain.
  int joint() const noexcept { return joint_; }

 private:
  static std::string format(double value, double limit, int joint) {
    std::string where = joint >= 0 ? "joint " + std::to_string(joint) + ": " : std::string{};
    return where + "angle " + std::to_string(value) + " rad outside limit +/-" +
           std::to_string(limit) + " rad";
  }

  double value_;
  double limit_;
  int joint_;
};

class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
      : Error(what + ": expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)) {}
  using Error::Error;
};

struct FieldIssue {
  std::string field;
  std::string message;
};

/// Rejected chain spec; carries one entry per offending field.
class InvalidSpecError : public Error {
 public:
  explicit InvalidSpecError(std::vector<FieldIssue> issues)
      : Error(summarize(issues)), issues_(std::move(issues)) {}
  InvalidSpecError(std::string field, std::string message)
      : InvalidSpecError(std::vector<FieldIssue>{{std::move(field), std::move(message)}}) {}

  const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

 private:
  static std::string summarize(const std::vector<FieldIssue>& issues) {
    std::string out = "invalid chain spec";
    for (const auto& i : issues) out += "; " + i.field + ": " + i.message;
    return out;
  }

  std::vector<FieldIssue> issues_;
};

class UnknownSessionError : public Error {
 public:
  explicit UnknownSessionError(const std::string& id) : Error("unknown session '" + id + "'") {}
};

}  // namespace inflatable_arm
