#pragma once

// Transport-independent request routing for the session wire protocol.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "inflatable_arm/errors.hpp"
#include "inflatable_arm/sim_service.hpp"
#include "inflatable_arm/spec_json.hpp"

namespace inflatable_arm {

struct ApiResponse {
  int status = 200;
  Json body;
};

/// "/sessions/{id}/<rest>" -> {id, rest}.
struct SessionPath {
  std::string id;
  std::string rest;
};

inline std::optional<SessionPath> parse_session_path(std::string_view target) {
  if (auto q = target.find('?'); q != std::string_view::npos) target = target.substr(0, q);
  constexpr std::string_view prefix = "/sessions/";
  if (!target.starts_with(prefix)) return std::nullopt;
  target.remove_prefix(prefix.size());
  const auto slash = target.find('/');
  if (slash == 0 || slash == std::string_view::npos) return std::nullopt;
  return SessionPath{std::string(target.substr(0, slash)), std::string(target.substr(slash + 1))};
}

class ApiRouter {
 public:
  explicit ApiRouter(SessionManager& sessions) : sessions_(sessions) {}

  ApiResponse handle(std::string_view method, std::string_view target, std::string_view body) {
    try {
      return route(method, target, body);
    } catch (const InvalidSpecError& e) {
      Json issues = Json::array();
      for (const auto& i : e.issues()) issues.push_back({{"field", i.field}, {"message", i.message}});
      return {400, {{"error", "invalid_spec"}, {"message", e.what()}, {"issues", issues}}};
    } catch (const UnknownSessionError& e) {
      return error(404, "unknown_session", e.what());
    } catch (const JointLimitError& e) {
      return {422,
              {{"error", "joint_limit"},
               {"message", e.what()},
               {"joint", e.joint() >= 0 ? Json(e.joint() + 1) : Json(nullptr)},
               {"value_deg", rad2deg(e.value())},
               {"limit_deg", rad2deg(e.limit())}}};
    } catch (const DimensionError& e) {
      return error(400, "malformed_vector", e.what());
    } catch (const Json::exception& e) {
      return error(400, "malformed_json", e.what());
    } catch (const Error& e) {
      return error(400, "bad_request", e.what());
    }
  }

 private:
  static ApiResponse error(int status, std::string_view code, std::string_view message) {
    return {status, {{"error", code}, {"message", message}}};
  }

  static std::vector<double> number_array(const Json& body, const char* key, std::size_t expect = 0) {
    const auto it = body.find(key);
    if (it == body.end() || !it->is_array())
      throw DimensionError(std::string("'") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : *it) {
      if (!v.is_number()) throw DimensionError(std::string("'") + key + "' must contain numbers");
      out.push_back(v.get<double>());
    }
    if (expect != 0 && out.size() != expect) throw DimensionError(key, expect, out.size());
    return out;
  }

  ApiResponse route(std::string_view method, std::string_view target, std::string_view body) {
    if (target == "/sessions" || target.starts_with("/sessions?")) {
      if (method != "POST") return error(405, "method_not_allowed", "use POST /sessions");
      const auto req = session_request_from_json(Json::parse(body));
      return {201, {{"session_id", sessions_.create(req)}}};
    }
    const auto path = parse_session_path(target);
    if (!path) return error(404, "not_found", "no such endpoint");
    auto session = sessions_.get(path->id);

    if (path->rest == "state") {
      if (method != "GET") return error(405, "method_not_allowed", "use GET");
      return {200, to_json(session->snapshot())};
    }
    if (path->rest == "targets/joints") {
      if (method != "POST") return error(405, "method_not_allowed", "use POST");
      const auto j = Json::parse(body);
      auto deg = number_array(j, "angles_deg", session->chain().size());
      std::vector<double> rad;
      for (double d : deg) rad.push_back(deg2rad(d));
      session->set_joint_targets(rad);
      return {200, {{"ok", true}, {"targets_deg", deg}}};
    }
    if (path->rest == "targets/tip") {
      if (method != "POST") return error(405, "method_not_allowed", "use POST");
      const auto j = Json::parse(body);
      const auto p = number_array(j, "position_m", 3);
      double payload = 0.0;
      if (auto it = j.find("payload_kg"); it != j.end()) {
        if (!it->is_number()) throw DomainError("'payload_kg' must be a number");
        payload = it->get<double>();
      }
      const auto r = session->set_tip_target(Vec3{p[0], p[1], p[2]}, payload);
      Json targets = Json::array();
      for (double a : r.angles) targets.push_back(rad2deg(a));
      return {200,
              {{"converged", r.converged},
               {"residual_m", r.residual},
               {"iterations", r.iterations},
               {"targets_deg", targets}}};
    }
    return error(404, "not_found", "no such endpoint");
  }

  SessionManager& sessions_;
};

}  // namespace inflatable_arm
