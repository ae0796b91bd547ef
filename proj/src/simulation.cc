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

#include "cotransport/simulation.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace cotransport {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

bool noise_free(const SensorNoise& n) {
  return n.lidar_range_std == 0.0 && n.camera_range_std == 0.0 &&
         n.camera_bearing_std == 0.0;
}

VelocityCmd clamp_cmd(const VelocityCmd& c, double v_bar, double omega_bar) {
  return VelocityCmd{std::clamp(c.v, -v_bar, v_bar),
                     std::clamp(c.omega, -omega_bar, omega_bar)};
}

WorldModel world_seen_by(const Scenario& s, const std::vector<RobotState>& robots,
                         std::size_t self) {
  WorldModel w = s.world;
  if (s.lidar.include_robots) {
    for (std::size_t j = 0; j < robots.size(); ++j) {
      if (j != self) {
        w.obstacles.emplace_back(CircleObstacle{robots[j].pose.position, s.lidar.robot_radius});
      }
    }
  }
  return w;
}

RobotContext context_from_truth(const std::vector<RobotState>& robots,
                                const FollowerConstraints& fc, const ScanResult& scan) {
  RobotContext ctx;
  const Pose2D& self = robots[fc.robot].pose;
  ctx.neighbors.reserve(fc.neighbor_robots.size());
  for (std::size_t j : fc.neighbor_robots) {
    ctx.neighbors.push_back(to_frame(self, robots[j].pose.position));
  }
  ctx.obstacle_points = scan.points;
  return ctx;
}

std::vector<RobotState> initial_robots(const Scenario& s) {
  std::vector<RobotState> out;
  for (std::size_t i = 0; i < s.robots.size(); ++i) {
    RobotState r;
    r.pose = s.robots[i].initial_pose;
    r.camera_angle = wrap_angle(s.robots[i].camera_angle);
    r.id = static_cast<int>(i);
    r.role = s.robots[i].role;
    out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<double> initial_betas(const Scenario& s) {
  const auto robots = initial_robots(s);
  const auto sets = build_constraints(s);
  std::vector<double> out;
  for (const auto& fc : sets) {
    const ScanResult scan = simulate_lidar(robots[fc.robot], world_seen_by(s, robots, fc.robot),
                                           s.lidar.range, s.lidar.beams);
    out.push_back(evaluate(context_from_truth(robots, fc, scan), fc.set).beta);
  }
  return out;
}

Simulation::Simulation(Scenario scenario) : scenario_(std::move(scenario)) {
  const ValidationReport report = validate_scenario(scenario_);
  if (!report.ok()) {
    std::ostringstream msg;
    msg << "invalid scenario:";
    for (const auto& e : report.errors) msg << "\n  " << e;
    throw ScenarioError(msg.str());
  }
  constraints_ = build_constraints(scenario_);
  followers_ = scenario_.follower_indices();
  robots_ = initial_robots(scenario_);

  const auto offsets = scenario_.follower_offsets();
  const std::size_t capacity =
      scenario_.sim.buffer_capacity > 0
          ? scenario_.sim.buffer_capacity
          : default_buffer_capacity(offsets, scenario_.sim.min_leader_speed, scenario_.sim.dt);
  leader_buffer_ = TrajectoryBuffer(capacity);
  double reach = 0.0;
  for (const auto& o : offsets) reach = std::max(reach, std::abs(o.s));
  seed_straight_history(leader_buffer_, robots_[0].pose, scenario_.leader.v_nominal,
                        scenario_.sim.dt, 1.25 * reach + 0.5);
  if (leader_buffer_.arc_length() < reach) {
    throw ScenarioError("sim.buffer_capacity too small to cover the follower offsets");
  }
  channel_ = BroadcastChannel(followers_.size(), capacity);
  memory_.resize(followers_.size());
  rng_.seed(scenario_.sim.seed);
  eval_opts_.saturated_gradient_norm = scenario_.sim.saturated_gradient_norm;
}

bool Simulation::goal_reached() const {
  return (robots_[0].pose.position - scenario_.world.goal).norm() <=
         scenario_.sim.goal_tolerance;
}

void Simulation::add_violation(std::size_t robot, const std::string& kind,
                               const std::string& detail) {
  ++summary_.violation_count;
  if (summary_.violations.size() < RunSummary::kMaxStoredViolations) {
    summary_.violations.push_back(Violation{step_, scenario_.robots[robot].name, kind, detail});
  }
}

ScanResult Simulation::scan_for(std::size_t robot) {
  const bool noisy = scenario_.noise.lidar_range_std > 0.0;
  return simulate_lidar(robots_[robot], world_seen_by(scenario_, robots_, robot),
                        scenario_.lidar.range, scenario_.lidar.beams,
                        scenario_.noise.lidar_range_std, noisy ? &rng_ : nullptr);
}

RobotContext Simulation::truth_context(std::size_t follower_slot,
                                       const ScanResult& scan) const {
  return context_from_truth(robots_, constraints_[follower_slot], scan);
}

Simulation::FollowerOutput Simulation::compute_follower(
    std::size_t slot, const ScanResult& scan,
    const std::optional<RelativePoseMeasurement>& cam) const {
  const Scenario& sc = scenario_;
  const FollowerConstraints& fc = constraints_[slot];
  const RobotState& self = robots_[fc.robot];
  const RobotConfig& cfg = sc.robots[fc.robot];
  const TrajectoryBuffer& buffer = channel_.buffer(slot);
  const FollowerMemory& mem = memory_[slot];
  const Pose2D leader_now = buffer.newest().pose;

  FollowerOutput out;
  const auto gen_start = Clock::now();
  out.visible = cam.has_value();
  RelativePoseMeasurement m;
  Pose2D own_estimate;
  if (out.visible) {
    m = *cam;
    own_estimate = compose(leader_now, inverse(Pose2D(m.relative_position, m.relative_heading)));
  } else {
    // Dead reckoning: own odometry against the extrapolated leader pose.
    own_estimate = self.pose;
    const Pose2D rel = relative_pose(own_estimate, leader_now);
    m.relative_position = rel.position;
    m.relative_heading = rel.heading;
  }
  const double bearing = std::atan2(m.relative_position.y(), m.relative_position.x());
  const double delta = wrap_angle(bearing - self.camera_angle);
  out.camera_rate = rotate_camera(delta, sc.camera.deadband, sc.camera.gain);
  out.camera_rate = std::clamp(out.camera_rate, -sc.camera.max_rate, sc.camera.max_rate);

  ReferenceTarget target;
  try {
    target = generate_reference(buffer, cfg.offset, m);
  } catch (const StaleBuffer&) {
    out.reference_ok = false;
  }
  out.generation_us = micros_since(gen_start);

  const auto track_start = Clock::now();
  if (out.reference_ok) {
    out.error = tracking_error(target.desired_pose_local);
    out.tracking = tracking_control(out.error, VelocityCmd{target.v_r, target.omega_r},
                                    sc.gains);
  } else {
    out.error = TrackingError{kNaN, kNaN, kNaN};
    const bool hold = mem.dropout_time + sc.sim.dt <= sc.sim.grace_window;
    out.tracking = hold ? mem.last_tracking : VelocityCmd{};
  }

  RobotContext ctx;
  ctx.neighbors.reserve(fc.neighbor_robots.size());
  for (std::size_t j : fc.neighbor_robots) {
    ctx.neighbors.push_back(j == sc.leader_index()
                                ? m.relative_position
                                : to_frame(own_estimate, robots_[j].pose.position));
  }
  ctx.obstacle_points = scan.points;
  evaluate_into(ctx, fc.set, eval_opts_, out.eval);
  out.preserve = preservation_control(out.eval.tau, 0.0, sc.gains);
  const BlendResult b = blend(out.tracking, out.preserve, out.eval.beta,
                              sc.gains.beta_threshold);
  out.cmd = b.cmd;
  out.state = b.state;
  out.tracking_us = micros_since(track_start);
  return out;
}

void Simulation::check_follower(std::size_t slot, const FollowerOutput& out,
                                const ScanResult& scan) {
  const Scenario& sc = scenario_;
  const FollowerConstraints& fc = constraints_[slot];
  const std::size_t robot = fc.robot;
  FollowerMemory& mem = memory_[slot];

  const RobotContext truth = truth_context(slot, scan);
  const ConstraintEvaluation truth_eval =
      noise_free(sc.noise) ? out.eval : evaluate(truth, fc.set, eval_opts_);
  const VelocityCmd applied = clamp_cmd(out.cmd, sc.gains.v_bar, sc.gains.omega_bar);

  for (std::size_t k = 0; k < fc.set.size(); ++k) {
    const ConstraintSpec& spec = fc.set[k];
    const double g = truth_eval.g[k];
    if (!std::isfinite(g)) continue;
    const bool low_bad = spec.kind != ConstraintKind::kUpperBounded && g < spec.lower;
    const bool high_bad = spec.kind != ConstraintKind::kLowerBounded && g > spec.upper;
    if (low_bad || high_bad) {
      std::ostringstream d;
      d << spec.label << " = " << g << " outside [" << spec.lower << ", " << spec.upper << "]";
      add_violation(robot, "constraint", d.str());
    }
    if (spec.mixed) {
      const double r = (truth.neighbors[spec.selector.neighbors[0]] - truth.own_position).norm();
      const double raw = spec.mixed->raw_value(applied.v, applied.omega, r);
      if (raw < spec.mixed->lower || raw > spec.mixed->upper) {
        std::ostringstream d;
        d << spec.label << " raw value " << raw << " outside [" << spec.mixed->lower << ", "
          << spec.mixed->upper << "]";
        add_violation(robot, "mixed", d.str());
      }
    }
  }
  if (truth_eval.beta > 1.0 || !(truth_eval.psi < 1.0)) {
    std::ostringstream d;
    d << "beta = " << truth_eval.beta << ", psi = " << truth_eval.psi;
    add_violation(robot, "psi_saturated", d.str());
  }
  if (std::abs(out.cmd.v) > sc.gains.v_bar || std::abs(out.cmd.omega) > sc.gains.omega_bar) {
    std::ostringstream d;
    d << "command (" << out.cmd.v << ", " << out.cmd.omega << ") exceeds caps";
    add_violation(robot, "velocity", d.str());
  }

  if (out.state.mode == ProcessMode::kPreservation) {
    if (!mem.in_preservation) {
      mem.in_preservation = true;
      mem.preservation_bound =
          1.0 - std::pow(1.0 - sc.gains.beta_threshold, static_cast<double>(fc.set.size()));
      ++summary_.preservation_entries;
    }
    summary_.max_psi_in_preservation = std::max(summary_.max_psi_in_preservation, out.eval.psi);
    if (out.eval.psi > mem.preservation_bound + 1e-9) {
      std::ostringstream d;
      d << "psi = " << out.eval.psi << " above entry bound " << mem.preservation_bound;
      add_violation(robot, "preservation_bound", d.str());
    }
  } else {
    mem.in_preservation = false;
  }
  if (out.eval.saturated) ++summary_.saturated_steps;
  summary_.max_tau_norm = std::max(summary_.max_tau_norm, out.eval.tau.norm());
  if (!out.visible && mem.was_visible) ++summary_.visibility_losses;
  mem.was_visible = out.visible;
  if (!out.reference_ok) {
    ++summary_.stale_reference_steps;
    mem.dropout_time += sc.sim.dt;
  } else {
    mem.dropout_time = 0.0;
    mem.last_tracking = out.tracking;
  }
}

bool Simulation::step() {
  if (finished_) return false;
  const Scenario& sc = scenario_;
  summary_.final_goal_distance = (robots_[0].pose.position - sc.world.goal).norm();
  if (goal_reached()) {
    summary_.reached_goal = true;
    finished_ = true;
    return false;
  }
  if (step_ >= sc.sim.max_steps) {
    finished_ = true;
    return false;
  }
  const double dt = sc.sim.dt;
  const double t = time();

  // Sense.
  std::vector<ScanResult> scans;
  scans.reserve(robots_.size());
  for (std::size_t i = 0; i < robots_.size(); ++i) scans.push_back(scan_for(i));
  const bool camera_noisy =
      sc.noise.camera_range_std > 0.0 || sc.noise.camera_bearing_std > 0.0;
  std::vector<std::optional<RelativePoseMeasurement>> cams;
  for (std::size_t i : followers_) {
    cams.push_back(simulate_camera(robots_[i], robots_[0].pose, sc.camera.fov,
                                   sc.camera_range, sc.noise,
                                   camera_noisy ? &rng_ : nullptr));
  }

  // Leader guidance and communication.
  const auto leader_start = Clock::now();
  const LeaderDecision decision =
      leader_step(scans[0], robots_[0].pose, sc.world.goal, sc.leader);
  const double leader_us = micros_since(leader_start);
  LeaderSample sample;
  sample.pose = robots_[0].pose;
  sample.v = decision.cmd.v;
  sample.omega = decision.cmd.omega;
  sample.t = leader_buffer_.newest().t + dt;
  leader_buffer_.push(sample);
  const bool changed = !last_leader_cmd_ || !(*last_leader_cmd_ == decision.cmd);
  const bool sent = broadcast(changed, leader_buffer_, channel_, step_);
  if (!sent) {
    for (std::size_t k = 0; k < channel_.subscriber_count(); ++k) {
      extrapolate_in_place(channel_.buffer(k), dt);
    }
  }
  last_leader_cmd_ = decision.cmd;
  const int branch = static_cast<int>(decision.branch);
  if (last_leader_branch_ >= 0 && branch != last_leader_branch_) {
    ++summary_.leader_branch_switches;
  }
  last_leader_branch_ = branch;

  // Follower control. Each evaluation only reads shared state.
  std::vector<FollowerOutput> outs(followers_.size());
  if (sc.sim.parallel && followers_.size() > 1) {
    std::vector<std::future<FollowerOutput>> futures;
    for (std::size_t k = 0; k < followers_.size(); ++k) {
      futures.push_back(std::async(std::launch::async, [this, k, &scans, &cams] {
        return compute_follower(k, scans[followers_[k]], cams[k]);
      }));
    }
    for (std::size_t k = 0; k < futures.size(); ++k) outs[k] = futures[k].get();
  } else {
    for (std::size_t k = 0; k < followers_.size(); ++k) {
      outs[k] = compute_follower(k, scans[followers_[k]], cams[k]);
    }
  }

  // Online checks and telemetry.
  const VelocityCmd leader_cmd = clamp_cmd(decision.cmd, sc.gains.v_bar, sc.gains.omega_bar);
  if (std::isfinite(decision.rho_lo) && decision.rho_lo < sc.leader_min_obstacle_distance) {
    std::ostringstream d;
    d << "rho_lo = " << decision.rho_lo << " < " << sc.leader_min_obstacle_distance;
    add_violation(0, "leader_obstacle", d.str());
  }
  if (std::abs(decision.cmd.v) > sc.gains.v_bar ||
      std::abs(decision.cmd.omega) > sc.gains.omega_bar) {
    add_violation(0, "velocity", "leader command exceeds caps");
  }
  for (std::size_t k = 0; k < followers_.size(); ++k) {
    check_follower(k, outs[k], scans[followers_[k]]);
  }

  auto pair_extremes = [this](std::size_t i) {
    double lo = kInf, hi = 0.0;
    for (std::size_t j = 0; j < robots_.size(); ++j) {
      if (j == i) continue;
      const double d = (robots_[j].pose.position - robots_[i].pose.position).norm();
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    return std::pair{lo, hi};
  };
  if (record_telemetry_) {
    TelemetryRecord lr;
    lr.step = step_;
    lr.t = t;
    lr.robot = 0;
    lr.role = Role::kLeader;
    lr.x = robots_[0].pose.x();
    lr.y = robots_[0].pose.y();
    lr.theta = robots_[0].pose.heading;
    lr.v = leader_cmd.v;
    lr.omega = leader_cmd.omega;
    lr.beta = lr.psi = lr.x_e = lr.y_e = lr.theta_e = kNaN;
    lr.rho_io = decision.rho_lo;
    lr.rho_il = kNaN;
    std::tie(lr.min_pair, lr.max_pair) = pair_extremes(0);
    lr.camera_angle = lr.v_o = lr.omega_o = lr.tau_norm = kNaN;
    lr.leader_branch = branch;
    lr.broadcast = sent;
    telemetry_.push_back(lr);
    for (std::size_t k = 0; k < followers_.size(); ++k) {
      const std::size_t i = followers_[k];
      const FollowerOutput& o = outs[k];
      const VelocityCmd applied = clamp_cmd(o.cmd, sc.gains.v_bar, sc.gains.omega_bar);
      TelemetryRecord r;
      r.step = step_;
      r.t = t;
      r.robot = i;
      r.role = Role::kFollower;
      r.x = robots_[i].pose.x();
      r.y = robots_[i].pose.y();
      r.theta = robots_[i].pose.heading;
      r.v = applied.v;
      r.omega = applied.omega;
      r.beta = o.eval.beta;
      r.psi = o.eval.psi;
      r.mode = o.state.mode;
      r.x_e = o.error.x;
      r.y_e = o.error.y;
      r.theta_e = o.error.theta;
      r.rho_io = o.eval.rho_obstacle;
      r.rho_il = o.eval.rho_link;
      std::tie(r.min_pair, r.max_pair) = pair_extremes(i);
      r.camera_angle = robots_[i].camera_angle;
      r.v_o = o.preserve.v;
      r.omega_o = o.preserve.omega;
      r.tau_norm = o.eval.tau.norm();
      r.visible = o.visible;
      r.reference_ok = o.reference_ok;
      r.broadcast = sent;
      telemetry_.push_back(r);
    }
  }
  if (record_timing_) {
    timing_.push_back(TimingRecord{step_, 0, leader_us, 0.0});
    for (std::size_t k = 0; k < followers_.size(); ++k) {
      timing_.push_back(
          TimingRecord{step_, followers_[k], outs[k].generation_us, outs[k].tracking_us});
    }
  }

  // Integrate.
  robots_[0] = step_kinematics(robots_[0], leader_cmd, dt);
  for (std::size_t k = 0; k < followers_.size(); ++k) {
    RobotState& r = robots_[followers_[k]];
    r = step_kinematics(r, clamp_cmd(outs[k].cmd, sc.gains.v_bar, sc.gains.omega_bar), dt);
    r.camera_angle = wrap_angle(r.camera_angle + outs[k].camera_rate * dt);
  }
  ++step_;
  summary_.steps = step_;
  summary_.transmissions = channel_.transmissions().size();
  summary_.final_goal_distance = (robots_[0].pose.position - sc.world.goal).norm();
  return true;
}

RunSummary Simulation::run() {
  while (step()) {
  }
  summary_.reached_goal = summary_.reached_goal || goal_reached();
  return summary_;
}

}  // namespace cotransport
