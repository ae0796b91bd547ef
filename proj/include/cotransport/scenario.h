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

#ifndef COTRANSPORT_SCENARIO_H_
#define COTRANSPORT_SCENARIO_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cotransport/constraints.h"
#include "cotransport/controller.h"
#include "cotransport/follower_trajectory.h"
#include "cotransport/leader_navigation.h"
#include "cotransport/payload_geometry.h"
#include "cotransport/world.h"

namespace cotransport {

inline constexpr int kScenarioFormatVersion = 1;

/// Parse or validation failure of a scenario. `line` is 1-based, 0 when no
/// source position applies.
class ScenarioError : public Error {
 public:
  ScenarioError(const std::string& what, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

struct RobotConfig {
  std::string name;
  Role role = Role::kFollower;
  Pose2D initial_pose;
  double camera_angle = 0.0;          // initial, relative to the body
  CurvilinearOffset offset;           // followers only
  std::vector<std::size_t> links;     // robot indices of link partners
};

/// Which robots a declaration applies to; empty means every follower or
/// every neighbor respectively.
struct ConstraintDecl {
  enum class Type { kTwoSided, kLower, kUpper, kMixed };
  Type type = Type::kLower;
  SelectorType selector = SelectorType::kObstacleDistance;
  std::vector<std::size_t> followers;  // robot indices
  std::vector<std::size_t> neighbors;  // robot indices
  bool formation_bounds = false;       // pairwise band from payload geometry
  double lower = -kInf;
  double upper = kInf;
  double margin = 0.0;
  MixedSpec mixed;
  std::string label;
  int line = 0;
};

struct CameraParams {
  double fov = 1.6;
  double deadband = 0.5;
  double gain = 0.2;
  double max_rate = kInf;
};

struct LidarParams {
  std::size_t beams = 360;
  double range = 8.0;
  bool include_robots = false;
  double robot_radius = 0.2;
};

struct SimParams {
  double dt = 0.02;
  long max_steps = 150000;
  std::uint64_t seed = 1;
  double goal_tolerance = 0.3;
  double grace_window = 0.2;
  double min_leader_speed = 0.05;
  std::size_t buffer_capacity = 0;  // 0: derived from offsets and speed
  double saturated_gradient_norm = 10.0;
  bool parallel = false;
};

struct Scenario {
  int format_version = kScenarioFormatVersion;
  std::string name;
  WorldModel world;
  PayloadParams payload;
  std::optional<double> reported_r_plus;
  std::optional<double> reported_r_minus;
  double collision_distance = 0.4;  // rho_c
  double camera_range = 10.0;       // c_max
  std::vector<RobotConfig> robots;  // robots[0] is the leader
  LeaderParams leader;
  double leader_min_obstacle_distance = 0.5;
  ControlGains gains;
  CameraParams camera;
  LidarParams lidar;
  SensorNoise noise;
  std::vector<ConstraintDecl> constraints;
  SimParams sim;

  std::size_t leader_index() const { return 0; }
  std::vector<std::size_t> follower_indices() const;
  std::vector<CurvilinearOffset> follower_offsets() const;
  /// Curvilinear offset of any robot; the leader sits at (0, 0).
  CurvilinearOffset offset_of(std::size_t robot) const;
  std::size_t index_of(const std::string& name) const;
};

/// Reads a scenario from YAML text. Throws ScenarioError with the offending
/// line on malformed input. Does not run the semantic checks.
Scenario parse_scenario(const std::string& yaml_text);

/// parse_scenario on a file's contents.
Scenario load_scenario_file(const std::string& path);

/// Expanded per-follower constraint set, together with the robot index each
/// context neighbor slot refers to.
struct FollowerConstraints {
  std::size_t robot = 0;
  std::vector<std::size_t> neighbor_robots;  // context slot -> robot index
  ConstraintSet set;
};

/// Expands the declarations into one ConstraintSet per follower. Neighbor
/// slots list every other robot, leader first.
std::vector<FollowerConstraints> build_constraints(const Scenario& s);

/// Pairwise band between two robots from the payload geometry, rho_c and
/// c_max.
DistanceBand formation_band(const Scenario& s, std::size_t a, std::size_t b);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
  std::optional<ScaleBounds> scale;
  std::vector<double> initial_beta;  // per follower

  bool ok() const { return errors.empty(); }
  std::string to_string() const;
};

/// Full semantic check: payload feasibility, pairwise bands, leader
/// parameter chain, gain envelope, constraint consistency and the initial
/// beta <= beta_t precondition. Reported r+/r- values that disagree with the
/// payload formulas are flagged as warnings.
ValidationReport validate_scenario(const Scenario& s);

}  // namespace cotransport

#endif  // COTRANSPORT_SCENARIO_H_
