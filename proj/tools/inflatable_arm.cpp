// Command-line front end: workspace sampling, lifting torque tables, IK
// queries, the simulation server, and the analytic self-check.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "inflatable_arm/http_server.hpp"
#include "inflatable_arm/inflatable_arm.hpp"
#include "inflatable_arm/self_check.hpp"

namespace ia = inflatable_arm;

namespace {

std::vector<double> parse_list(const std::string& text, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw ia::Error("cannot parse number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// "lo:hi" in degrees.
ia::AngleInterval parse_interval(const std::string& text) {
  const auto v = parse_list(text, ':');
  if (v.size() != 2) throw ia::Error("expected lo:hi, got '" + text + "'");
  return {ia::deg2rad(v[0]), ia::deg2rad(v[1])};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ia::Error("cannot write '" + path + "'");
  return out;
}

volatile std::sig_atomic_t g_stop = 0;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinematics, tendon statics and simulation for inflatable Hilberry-joint arms"};
  app.require_subcommand(1);

  std::string spec_file;
  std::string out_file;

  auto* ws = app.add_subcommand("workspace", "Sample the tip workspace over a joint grid");
  std::string ranges_text;
  std::size_t resolution = 31;
  ws->add_option("--spec", spec_file, "Chain spec JSON")->required()->check(CLI::ExistingFile);
  ws->add_option("--ranges", ranges_text, "Per-joint ranges in degrees, e.g. 0:150,-150:150")
      ->required();
  ws->add_option("--resolution", resolution, "Grid points per joint")->check(CLI::Range(2, 10000000));
  ws->add_option("--out", out_file, "Output CSV")->required();

  auto* tt = app.add_subcommand("torque-table", "Sweep a lifting joint under a load preset");
  std::string load_name;
  std::string sweep_text = "0:45";
  std::size_t lift_joint = 1;
  double force_limit = std::numeric_limits<double>::infinity();
  double step_deg = 1.0;
  tt->add_option("--spec", spec_file, "Chain spec JSON")->required()->check(CLI::ExistingFile);
  tt->add_option("--load", load_name, "1dof-text | 1dof-caption | 2dof-text | 2dof-caption")
      ->required();
  tt->add_option("--sweep", sweep_text, "Swept range in degrees, lo:hi");
  tt->add_option("--joint", lift_joint, "Lifting joint (1-based)")->check(CLI::PositiveNumber);
  tt->add_option("--force-limit", force_limit, "Motor tendon force limit [N]");
  tt->add_option("--step-deg", step_deg, "Sample spacing [deg]")->check(CLI::PositiveNumber);
  tt->add_option("--out", out_file, "Output CSV")->required();

  auto* ik = app.add_subcommand("ik", "Solve position IK for a tip target");
  std::string target_text;
  std::string seed_text;
  ik->add_option("--spec", spec_file, "Chain spec JSON")->required()->check(CLI::ExistingFile);
  ik->add_option("--target", target_text, "X,Y,Z in meters")->required();
  ik->add_option("--seed", seed_text, "Seed angles in degrees, comma separated");

  auto* serve = app.add_subcommand("serve", "Run the HTTP/WebSocket simulation service");
  ia::ServerOptions server_opt;
  std::string log_file;
  serve->add_option("--port", server_opt.port, "TCP port")->required();
  serve->add_option("--address", server_opt.address, "Bind address");
  serve->add_option("--log", log_file, "Append every stepped snapshot as a JSON line");

  auto* check = app.add_subcommand("check", "Run the analytic-identity self-test");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ws) {
      const ia::ChainSpec chain(ia::load_session_request(spec_file).chain);
      std::vector<ia::AngleInterval> ranges;
      std::stringstream ss(ranges_text);
      for (std::string item; std::getline(ss, item, ',');) ranges.push_back(parse_interval(item));
      const auto cloud = ia::sample_workspace(chain, ranges, resolution);
      auto out = open_out(out_file);
      ia::write_workspace_csv(out, cloud);
      double reach = 0.0;
      for (const auto& p : cloud.tips) reach = std::max(reach, p.norm());
      std::printf("points: %zu\nmax_base_distance_m: %.9g\n", cloud.size(), reach);
      return 0;
    }

    if (*tt) {
      const ia::ChainSpec chain(ia::load_session_request(spec_file).chain);
      const auto preset = ia::presets::find_load_preset(load_name);
      if (!preset) throw ia::Error("unknown load preset '" + load_name + "'");
      if (preset->dof != chain.size())
        std::fprintf(stderr, "warning: preset %s is defined for a %zu-DoF arm, spec has %zu\n",
                     load_name.c_str(), preset->dof, chain.size());
      ia::LoadCase load{preset->payload, std::vector<double>(chain.size(), 0.0)};
      const auto report = ia::lift_feasibility(chain, load, force_limit, parse_interval(sweep_text),
                                               lift_joint - 1, ia::deg2rad(step_deg),
                                               ia::StaticsOptions{preset->link_masses});
      auto out = open_out(out_file);
      out << "angle_deg,torque_Nm,active_tendon,moment_arm_m,force_N,feasible\n";
      for (const auto& s : report.samples) {
        out << ia::format_sig9(ia::rad2deg(s.angle)) << ',' << ia::format_sig9(s.actuation.torque)
            << ',' << ia::to_string(s.actuation.tendon) << ','
            << ia::format_sig9(s.actuation.moment_arm) << ','
            << ia::format_sig9(s.actuation.force()) << ',' << (s.within_limit ? 1 : 0) << '\n';
      }
      std::cout << "load: " << load_name << '\n' << ia::to_text(report);
      return 0;
    }

    if (*ik) {
      const ia::ChainSpec chain(ia::load_session_request(spec_file).chain);
      const auto t = parse_list(target_text);
      if (t.size() != 3) throw ia::Error("--target needs X,Y,Z");
      std::vector<double> seed(chain.size(), 0.0);
      if (!seed_text.empty()) {
        seed.clear();
        for (double d : parse_list(seed_text)) seed.push_back(ia::deg2rad(d));
      }
      const auto r = ia::solve_ik(chain, ia::Vec3{t[0], t[1], t[2]}, seed);
      std::printf("angles_deg:");
      for (double a : r.angles) std::printf(" %.9g", ia::rad2deg(a));
      std::printf("\nresidual_m: %.9g\nconverged: %s\niterations: %d\n", r.residual,
                  r.converged ? "true" : "false", r.iterations);
      return r.converged ? 0 : 3;
    }

    if (*serve) {
      std::unique_ptr<ia::SnapshotLog> log;
      if (!log_file.empty()) log = std::make_unique<ia::SnapshotLog>(log_file);
      ia::SessionManager sessions(
          log ? ia::SessionManager::SnapshotSink([&](const ia::RobotSnapshot& s) { log->write(s); })
              : ia::SessionManager::SnapshotSink{});
      ia::SimServer server(sessions, server_opt);
      const auto port = server.start();
      std::printf("listening on %s:%u\n", server_opt.address.c_str(), port);
      std::fflush(stdout);
      std::signal(SIGINT, [](int) { g_stop = 1; });
      std::signal(SIGTERM, [](int) { g_stop = 1; });
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
      return 0;
    }

    if (*check) {
      bool ok = true;
      for (const auto& r : ia::run_self_checks()) {
        std::printf("[%s] %s (error %.3g, tolerance %.3g)\n", r.passed ? "PASS" : "FAIL",
                    r.name.c_str(), r.error, r.tolerance);
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const ia::InvalidSpecError& e) {
    std::fprintf(stderr, "error: invalid spec\n");
    for (const auto& i : e.issues())
      std::fprintf(stderr, "  %s: %s\n", i.field.c_str(), i.message.c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
