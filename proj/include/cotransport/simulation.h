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

#ifndef COTRANSPORT_SIMULATION_H_
#define COTRANSPORT_SIMULATION_H_

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cotransport/constraints.h"
#include "cotransport/controller.h"
#include "cotransport/follower_trajectory.h"
#include "cotransport/leader_navigation.h"
#include "cotransport/scenario.h"
#include "cotransport/world.h"

namespace cotransport {

struct Violation {
  long step = 0;
  std::string robot;
  std::string kind;
  std::string detail;
};

/// One row of telemetry: the state of one robot at one step, before the
/// step's commands are integrated. Follower-only fields are NaN for the
/// leader and vice versa.
struct TelemetryRecord {
  long step = 0;
  double t = 0.0;
  std::size_t robot = 0;
  Role role = Role::kFollower;
  double x = 0.0, y = 0.0, theta = 0.0;
  double v = 0.0, omega = 0.0;
  double beta = 0.0, psi = 0.0;
  ProcessMode mode = ProcessMode::kNormal;
  double x_e = 0.0, y_e = 0.0, theta_e = 0.0;
  double rho_io = 0.0, rho_il = 0.0;
  double min_pair = 0.0, max_pair = 0.0;
  double camera_angle = 0.0;
  double v_o = 0.0, omega_o = 0.0;
  double tau_norm = 0.0;
  bool visible = false;
  bool reference_ok = true;
  int leader_branch = -1;
  bool broadcast = false;
};

/// Per-step wall time of one robot's computations, kept apart from the
/// telemetry so that telemetry stays reproducible byte for byte.
struct TimingRecord {
  long step = 0;
  std::size_t robot = 0;
  double generation_us = 0.0;  // leader guidance or follower reference
  double tracking_us = 0.0;    // follower constraint evaluation and control
};

struct RunSummary {
  bool reached_goal = false;
  long steps = 0;
  std::vector<Violation> violations;  // first kMaxStoredViolations
  long violation_count = 0;
  std::size_t transmissions = 0;
  long preservation_entries = 0;
  long visibility_losses = 0;
  long stale_reference_steps = 0;
  long leader_branch_switches = 0;
  long saturated_steps = 0;
  double max_tau_norm = 0.0;
  double max_psi_in_preservation = 0.0;
  double final_goal_distance = 0.0;

  static constexpr std::size_t kMaxStoredViolations = 1000;
};

/// Initial beta of every follower, in follower order, from the scenario's
/// initial poses.
std::vector<double> initial_betas(const Scenario& s);

/// Deterministic multi-robot world stepped in the fixed order
/// sense -> communicate -> control -> integrate.
class Simulation {
 public:
  /// Validates the scenario; throws ScenarioError listing every problem.
  explicit Simulation(Scenario scenario);

  /// Advances one step. Returns false once the leader reached the goal or
  /// max_steps were taken; no state changes in that case.
  bool step();

  /// Steps to completion.
  RunSummary run();

  const Scenario& scenario() const { return scenario_; }
  const RunSummary& summary() const { return summary_; }
  long step_index() const { return step_; }
  double time() const { return static_cast<double>(step_) * scenario_.sim.dt; }
  const std::vector<RobotState>& robots() const { return robots_; }
  const TrajectoryBuffer& leader_buffer() const { return leader_buffer_; }
  const BroadcastChannel& channel() const { return channel_; }
  const std::vector<FollowerConstraints>& constraints() const { return constraints_; }
  const std::vector<TelemetryRecord>& telemetry() const { return telemetry_; }
  const std::vector<TimingRecord>& timing() const { return timing_; }

  void set_record_telemetry(bool on) { record_telemetry_ = on; }
  void set_record_timing(bool on) { record_timing_ = on; }

  /// Builds a follower's constraint context from the true world state, in
  /// the follower's frame.
  RobotContext truth_context(std::size_t follower_slot, const ScanResult& scan) const;

 private:
  struct FollowerMemory {
    VelocityCmd last_tracking;
    double dropout_time = 0.0;
    bool in_preservation = false;
    double preservation_bound = 0.0;
    bool was_visible = true;
  };

  struct FollowerOutput {
    VelocityCmd cmd;          // before actuator clamping
    VelocityCmd tracking;
    VelocityCmd preserve;
    ProcessState state;
    ConstraintEvaluation eval;
    TrackingError error;
    double camera_rate = 0.0;
    bool visible = false;
    bool reference_ok = true;
    double generation_us = 0.0;
    double tracking_us = 0.0;
  };

  FollowerOutput compute_follower(std::size_t slot, const ScanResult& scan,
                                  const std::optional<RelativePoseMeasurement>& cam) const;
  ScanResult scan_for(std::size_t robot);
  void check_follower(std::size_t slot, const FollowerOutput& out,
                      const ScanResult& scan);
  void add_violation(std::size_t robot, const std::string& kind,
                     const std::string& detail);
  bool goal_reached() const;

  Scenario scenario_;
  std::vector<FollowerConstraints> constraints_;
  std::vector<std::size_t> followers_;
  std::vector<RobotState> robots_;
  TrajectoryBuffer leader_buffer_;
  BroadcastChannel channel_;
  std::vector<FollowerMemory> memory_;
  std::mt19937_64 rng_;
  EvaluationOptions eval_opts_;
  long step_ = 0;
  bool finished_ = false;
  std::optional<VelocityCmd> last_leader_cmd_;
  int last_leader_branch_ = -1;
  RunSummary summary_;
  std::vector<TelemetryRecord> telemetry_;
  std::vector<TimingRecord> timing_;
  bool record_telemetry_ = true;
  bool record_timing_ = true;
};

}  // namespace cotransport

#endif  // COTRANSPORT_SIMULATION_H_
