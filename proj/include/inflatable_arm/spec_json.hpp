#pragma once

// JSON form of a chain (the body of POST /sessions and the preset files).
//
//   {"links": [{"L_m":0.33,"D_m":0.08,"h_m":0.16,"alpha":0.5,"mass_kg":0.15,
//               "axis":"parallel"}],
//    "limits_deg": [150], "gravity": [0,-9.81,0], "omega_max_deg_s": 30}
//
// Optional: "base_link" (same shape as a link), "tendons" ([{"inner":true,
// "outer":true}] per joint), "initial_angles_deg", "motor_force_limit_N".

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "inflatable_arm/chain.hpp"
#include "inflatable_arm/errors.hpp"
#include "inflatable_arm/units.hpp"

namespace inflatable_arm {

using Json = nlohmann::json;

inline constexpr double kDefaultOmegaMaxDeg = 30.0;

struct SessionRequest {
  ChainConfig chain;
  double omega_max = deg2rad(kDefaultOmegaMaxDeg);  // rad/s
  std::vector<double> initial_angles;               // rad; empty = zeros
  double motor_force_limit = std::numeric_limits<double>::infinity();
};

namespace detail {

class IssueCollector {
 public:
  std::vector<FieldIssue> issues;

  std::optional<double> number(const Json& obj, const std::string& key, const std::string& path,
                               bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) issues.push_back({path + key, "missing"});
      return std::nullopt;
    }
    if (!it->is_number()) {
      issues.push_back({path + key, "must be a number"});
      return std::nullopt;
    }
    return it->get<double>();
  }

  std::optional<std::vector<double>> numbers(const Json& v, const std::string& field) {
    if (!v.is_array()) {
      issues.push_back({field, "must be an array of numbers"});
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) {
        issues.push_back({field, "must be an array of numbers"});
        return std::nullopt;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::optional<LinkSpec> link(const Json& v, const std::string& path) {
    if (!v.is_object()) {
      issues.push_back({path, "must be an object"});
      return std::nullopt;
    }
    const auto before = issues.size();
    LinkSpec l;
    const std::string p = path + ".";
    if (auto x = number(v, "L_m", p, true)) l.length = *x;
    if (auto x = number(v, "D_m", p, true)) l.diameter = *x;
    if (auto x = number(v, "h_m", p, true)) l.height = *x;
    if (auto x = number(v, "alpha", p, false)) l.anchor = *x;
    if (auto x = number(v, "mass_kg", p, true)) l.mass = *x;
    if (auto it = v.find("axis"); it != v.end()) {
      if (*it == "parallel") {
        l.axis = AxisRelation::parallel;
      } else if (*it == "orthogonal") {
        l.axis = AxisRelation::orthogonal;
      } else {
        issues.push_back({p + "axis", "must be \"parallel\" or \"orthogonal\""});
      }
    }
    if (issues.size() != before) return std::nullopt;
    return l;
  }
};

}  // namespace detail

inline Json link_to_json(const LinkSpec& l) {
  return {{"L_m", l.length},  {"D_m", l.diameter}, {"h_m", l.height},
          {"alpha", l.anchor}, {"mass_kg", l.mass}, {"axis", to_string(l.axis)}};
}

/// Parses a session request. Structural problems are reported per field.
/// Semantic checks (positivity, limits, matching diameters) are left to ChainSpec.
inline SessionRequest session_request_from_json(const Json& j) {
  detail::IssueCollector c;
  SessionRequest req;
  if (!j.is_object()) throw InvalidSpecError("", "body must be a JSON object");

  if (auto it = j.find("links"); it == j.end() || !it->is_array()) {
    c.issues.push_back({"links", "missing or not an array"});
  } else {
    for (std::size_t i = 0; i < it->size(); ++i)
      if (auto l = c.link((*it)[i], "links[" + std::to_string(i) + "]"))
        req.chain.links.push_back(*l);
  }
  if (auto it = j.find("base_link"); it != j.end()) {
    if (auto l = c.link(*it, "base_link")) req.chain.base_link = *l;
  }
  if (auto it = j.find("limits_deg"); it != j.end()) {
    if (it->is_number()) {
      req.chain.joint_limits.assign(req.chain.links.size(), deg2rad(it->get<double>()));
    } else if (auto v = c.numbers(*it, "limits_deg")) {
      for (double d : *v) req.chain.joint_limits.push_back(deg2rad(d));
    }
  }
  if (auto it = j.find("gravity"); it != j.end()) {
    auto v = c.numbers(*it, "gravity");
    if (v && v->size() == 3) {
      req.chain.gravity = Vec3{(*v)[0], (*v)[1], (*v)[2]};
    } else if (v) {
      c.issues.push_back({"gravity", "must have 3 components"});
    }
  }
  if (auto it = j.find("tendons"); it != j.end()) {
    if (!it->is_array()) {
      c.issues.push_back({"tendons", "must be an array"});
    } else {
      for (const auto& t : *it) {
        TendonSet s;
        if (t.is_object()) {
          s.inner = t.value("inner", true);
          s.outer = t.value("outer", true);
        }
        req.chain.tendons.push_back(s);
      }
    }
  }
  if (auto w = c.number(j, "omega_max_deg_s", "", false)) {
    if (*w > 0.0 && std::isfinite(*w)) {
      req.omega_max = deg2rad(*w);
    } else {
      c.issues.push_back({"omega_max_deg_s", "must be > 0"});
    }
  }
  if (auto it = j.find("initial_angles_deg"); it != j.end()) {
    if (auto v = c.numbers(*it, "initial_angles_deg"))
      for (double d : *v) req.initial_angles.push_back(deg2rad(d));
  }
  if (auto f = c.number(j, "motor_force_limit_N", "", false)) {
    if (*f >= 0.0) {
      req.motor_force_limit = *f;
    } else {
      c.issues.push_back({"motor_force_limit_N", "must be >= 0"});
    }
  }
  if (!c.issues.empty()) throw InvalidSpecError(std::move(c.issues));
  return req;
}

inline ChainConfig chain_config_from_json(const Json& j) {
  return session_request_from_json(j).chain;
}

inline Json chain_config_to_json(const ChainConfig& c, double omega_max = deg2rad(kDefaultOmegaMaxDeg)) {
  Json j;
  j["links"] = Json::array();
  for (const auto& l : c.links) j["links"].push_back(link_to_json(l));
  j["limits_deg"] = Json::array();
  for (double lim : c.joint_limits) j["limits_deg"].push_back(rad2deg(lim));
  j["gravity"] = {c.gravity.x(), c.gravity.y(), c.gravity.z()};
  j["omega_max_deg_s"] = rad2deg(omega_max);
  if (c.base_link) j["base_link"] = link_to_json(*c.base_link);
  return j;
}

inline SessionRequest load_session_request(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open spec file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidSpecError(path, std::string("JSON parse error: ") + e.what());
  }
  return session_request_from_json(j);
}

}  // namespace inflatable_arm
