#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "inflatable_arm/chain.hpp"
#include "inflatable_arm/units.hpp"

namespace inflatable_arm {

/// `%.9g` with negative zero folded to zero so output is byte-stable.
inline std::string format_sig9(double v) {
  if (v == 0.0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// CSV: x_m,y_m,z_m,theta1_deg..thetaN_deg, LF line endings.
inline void write_workspace_csv(std::ostream& os, const WorkspaceCloud& cloud) {
  os << "x_m,y_m,z_m";
  for (std::size_t j = 0; j < cloud.joints; ++j) os << ",theta" << j + 1 << "_deg";
  os << '\n';
  std::string row;
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    const auto& p = cloud.tips[k];
    row = format_sig9(p.x()) + ',' + format_sig9(p.y()) + ',' + format_sig9(p.z());
    for (double a : cloud.angles_of(k)) row += ',' + format_sig9(rad2deg(a));
    row += '\n';
    os << row;
  }
}

}  // namespace inflatable_arm
