#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

#include "inflatable_arm/chain.hpp"
#include "inflatable_arm/statics.hpp"

namespace inflatable_arm::presets {

/// Table I chain with `dof` links. The 3-DoF arm uses an orthogonal middle
/// link so that joint 3 moves out of the plane of joints 1 and 2.
inline ChainConfig table1_chain(std::size_t dof) {
  ChainConfig c;
  for (std::size_t i = 0; i < dof; ++i) {
    LinkSpec l;
    if (dof == 3 && i == 1) l.axis = AxisRelation::orthogonal;
    c.links.push_back(l);
  }
  c.joint_limits.assign(dof, table1::kRangeOfMotion);
  return c;
}

/// Lifting scenarios. The body text and the figure captions pair payload and
/// lever arm differently; both pairings are kept.
struct LoadPreset {
  std::string_view name;
  std::size_t dof;
  Payload payload;
  bool link_masses;  // the 1-DoF scenarios count the payload only
};

inline constexpr std::array<LoadPreset, 4> kLoadPresets{{
    {"1dof-text", 1, {5.0, 0.25}, false},
    {"1dof-caption", 1, {5.0, 0.60}, false},
    {"2dof-text", 2, {3.4, 0.60}, true},
    {"2dof-caption", 2, {3.4, 0.25}, true},
}};

inline std::optional<LoadPreset> find_load_preset(std::string_view name) {
  for (const auto& p : kLoadPresets)
    if (p.name == name) return p;
  return std::nullopt;
}

/// Amplitude of the lifting motion under load.
inline constexpr AngleInterval kLiftSweep{0.0, deg2rad(45.0)};

/// Joint ranges of the motion-capture run: joint 1 one-sided, the rest full.
inline constexpr std::array<AngleInterval, 3> kMocapRanges{{
    {0.0, deg2rad(150.0)},
    {-deg2rad(150.0), deg2rad(150.0)},
    {-deg2rad(150.0), deg2rad(150.0)},
}};

}  // namespace inflatable_arm::presets
