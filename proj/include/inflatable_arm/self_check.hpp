#pragma once

// Analytic identities that must hold for any build; run by `inflatable-arm check`.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "inflatable_arm/chain.hpp"
#include "inflatable_arm/hilberry_joint.hpp"
#include "inflatable_arm/presets.hpp"
#include "inflatable_arm/statics.hpp"
#include "inflatable_arm/tendon_routing.hpp"

namespace inflatable_arm {

struct CheckResult {
  std::string name;
  bool passed = false;
  double error = 0.0;      // worst observed deviation
  double tolerance = 0.0;
};

inline std::vector<CheckResult> run_self_checks() {
  std::vector<CheckResult> out;
  const double d = table1::kJointDiameter;
  const double lim = table1::kRangeOfMotion;
  auto grid = [&](int n, auto&& f) {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) worst = std::max(worst, f(-lim + 2.0 * lim * k / (n - 1)));
    return worst;
  };
  auto add = [&](std::string name, double err, double tol) {
    out.push_back({std::move(name), err <= tol, err, tol});
  };

  add("strap length equals the sum of both wrapped arcs",
      grid(301, [&](double t) {
        const double arcs = kPi * d * (kPi / 2 - t / 2) / (2 * kPi) +
                            kPi * d * (kPi / 2 + t / 2) / (2 * kPi);
        return std::abs(arcs - strap_length(d)) / strap_length(d);
      }),
      1e-12);

  add("rotation center stays on the D/2 circle",
      grid(301, [&](double t) { return std::abs(rotation_center(d, t).norm() - d / 2) / (d / 2); }),
      1e-12);

  TendonJointGeometry g;
  add("general and closed-form inner moment arms agree at zero angle",
      std::max(std::abs(moment_arm_inner(g, 0.0) - g.proximal_height / 2),
               std::abs(moment_arm_inner_closed_form(g.proximal_length, g.proximal_height, 0.0) -
                        g.proximal_height / 2)),
      1e-12);

  add("tendon pull is antisymmetric",
      grid(61, [&](double t) { return std::abs(tendon_pull(g, t, 0.3) + tendon_pull(g, 0.3, t)); }),
      0.0);

  for (std::size_t n = 1; n <= 3; ++n) {
    const ChainSpec chain(presets::table1_chain(n));
    const std::vector<double> zero(n, 0.0);
    const Vec3 tip = tip_position(chain, zero);
    const Vec3 expect{0.410 * static_cast<double>(n), 0.0, 0.0};
    add("straight " + std::to_string(n) + "-link chain reaches along x",
        (tip - expect).cwiseAbs().maxCoeff(), 1e-12);
  }

  {
    const ChainSpec one(presets::table1_chain(1));
    const auto& l = one.link(0);
    add("numeric Jacobian matches the link derivative", grid(31, [&](double t) {
          const double a = std::clamp(t, -lim + 1e-5, lim - 1e-5);
          const double reach = l.length + l.diameter / 2;
          const Vec3 analytic{-reach * std::sin(a) - l.diameter / 2 * std::sin(a / 2),
                              reach * std::cos(a) + l.diameter / 2 * std::cos(a / 2), 0.0};
          const std::vector<double> q{a};
          return (numeric_jacobian(one, q).matrix.col(0) - analytic).cwiseAbs().maxCoeff();
        }),
        1e-6);
  }

  {
    const MembraneSpec m{100e3, 0.080, 560e6, 0.35e-3};
    const double expect = 100e3 * 0.080 * 0.080 / (560e6 * 0.35e-3);
    add("membrane elongation p r^2/(E t)", std::abs(membrane_elongation(m) - expect) / expect, 1e-12);
  }
  return out;
}

}  // namespace inflatable_arm
