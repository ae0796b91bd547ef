// Copyright 2026 The Cotransport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cotransport/telemetry.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace cotransport {

namespace {

const char* role_name(Role r) { return r == Role::kLeader ? "leader" : "follower"; }

bool is_leader(const TelemetryRecord& r) { return r.role == Role::kLeader; }

class Row {
 public:
  explicit Row(std::ostream& os) : os_(os) {}
  ~Row() { os_ << '\n'; }

  Row& num(double x) { return text(format_number(x)); }
  Row& integer(long x) { return text(std::to_string(x)); }
  Row& text(const std::string& s) {
    if (!first_) os_ << ',';
    first_ = false;
    os_ << s;
    return *this;
  }

 private:
  std::ostream& os_;
  bool first_ = true;
};

void header(std::ostream& os, const std::vector<std::string>& cols) {
  Row row(os);
  for (const auto& c : cols) row.text(c);
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  return f;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  // Shortest text that parses back to the same double.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

const std::vector<std::string>& telemetry_columns() {
  static const std::vector<std::string> cols = {
      "step",    "t",        "robot",    "role",        "x",           "y",
      "theta",   "v",        "omega",    "beta",        "psi",         "mode",
      "x_e",     "y_e",      "theta_e",  "rho_io",      "rho_il",      "min_pair",
      "max_pair", "camera_angle", "v_o", "omega_o",     "tau_norm",    "visible",
      "reference_ok", "leader_branch", "broadcast"};
  return cols;
}

void write_telemetry_csv(std::ostream& os, const std::vector<TelemetryRecord>& records,
                         const Scenario& s) {
  header(os, telemetry_columns());
  for (const auto& r : records) {
    const bool lead = is_leader(r);
    Row row(os);
    row.integer(r.step).num(r.t).text(s.robots[r.robot].name).text(role_name(r.role));
    row.num(r.x).num(r.y).num(r.theta).num(r.v).num(r.omega);
    row.num(r.beta).num(r.psi).text(lead ? "" : to_string(r.mode));
    row.num(r.x_e).num(r.y_e).num(r.theta_e);
    row.num(r.rho_io).num(r.rho_il).num(r.min_pair).num(r.max_pair);
    row.num(r.camera_angle).num(r.v_o).num(r.omega_o).num(r.tau_norm);
    row.text(lead ? "" : (r.visible ? "1" : "0"));
    row.text(lead ? "" : (r.reference_ok ? "1" : "0"));
    row.text(lead ? std::to_string(r.leader_branch) : "");
    row.integer(r.broadcast ? 1 : 0);
  }
}

void write_timing_csv(std::ostream& os, const std::vector<TimingRecord>& records,
                      const Scenario& s) {
  header(os, {"step", "robot", "generation_us", "tracking_us"});
  for (const auto& r : records) {
    Row row(os);
    row.integer(r.step).text(s.robots[r.robot].name).num(r.generation_us).num(r.tracking_us);
  }
}

void write_summary(std::ostream& os, const RunSummary& s) {
  os << "reached_goal: " << (s.reached_goal ? "true" : "false") << '\n'
     << "steps: " << s.steps << '\n'
     << "final_goal_distance: " << format_number(s.final_goal_distance) << '\n'
     << "violations: " << s.violation_count << '\n'
     << "transmissions: " << s.transmissions << '\n'
     << "preservation_entries: " << s.preservation_entries << '\n'
     << "max_psi_in_preservation: " << format_number(s.max_psi_in_preservation) << '\n'
     << "visibility_losses: " << s.visibility_losses << '\n'
     << "stale_reference_steps: " << s.stale_reference_steps << '\n'
     << "leader_branch_switches: " << s.leader_branch_switches << '\n'
     << "saturated_steps: " << s.saturated_steps << '\n'
     << "max_tau_norm: " << format_number(s.max_tau_norm) << '\n';
  for (const auto& v : s.violations) {
    os << "violation step=" << v.step << " robot=" << v.robot << " kind=" << v.kind << ": "
       << v.detail << '\n';
  }
}

std::vector<std::string> emit_plots_data(const std::string& dir,
                                         const std::vector<TelemetryRecord>& records,
                                         const Scenario& s) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto name = [&](const TelemetryRecord& r) { return s.robots[r.robot].name; };

  const fs::path errors = fs::path(dir) / "errors.csv";
  {
    auto f = open_out(errors);
    header(f, {"t", "robot", "x_e", "y_e", "theta_e"});
    for (const auto& r : records) {
      Row(f).num(r.t).text(name(r)).num(r.x_e).num(r.y_e).num(r.theta_e);
    }
  }
  const fs::path distances = fs::path(dir) / "distances.csv";
  {
    auto f = open_out(distances);
    header(f, {"t", "robot", "rho_io", "rho_il", "min_pair", "max_pair"});
    for (const auto& r : records) {
      Row(f).num(r.t).text(name(r)).num(r.rho_io).num(r.rho_il).num(r.min_pair).num(r.max_pair);
    }
  }
  const fs::path velocities = fs::path(dir) / "velocities.csv";
  {
    auto f = open_out(velocities);
    header(f, {"t", "robot", "v", "omega", "v_o", "omega_o", "beta", "psi"});
    for (const auto& r : records) {
      Row(f).num(r.t).text(name(r)).num(r.v).num(r.omega).num(r.v_o).num(r.omega_o).num(r.beta)
          .num(r.psi);
    }
  }
  const fs::path camera = fs::path(dir) / "camera.csv";
  {
    auto f = open_out(camera);
    header(f, {"t", "robot", "camera_angle", "visible"});
    for (const auto& r : records) {
      Row(f).num(r.t).text(name(r)).num(r.camera_angle)
          .text(is_leader(r) ? "" : (r.visible ? "1" : "0"));
    }
  }
  for (const auto& p : {errors, distances, velocities, camera}) written.push_back(p.string());
  return written;
}

}  // namespace cotransport
