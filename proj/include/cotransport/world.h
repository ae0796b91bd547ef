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

#ifndef COTRANSPORT_WORLD_H_
#define COTRANSPORT_WORLD_H_

#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "cotransport/geometry.h"
#include "cotransport/trajectory_buffer.h"

namespace cotransport {

enum class Role { kLeader, kFollower };

struct RobotState {
  Pose2D pose;
  double camera_angle = 0.0;  // relative to the body, followers only
  int id = 0;
  Role role = Role::kFollower;
};

struct CircleObstacle {
  Vector2 center = Vector2::Zero();
  double radius = 0.0;
};

/// Convex polygon with counter-clockwise vertices.
struct PolygonObstacle {
  std::vector<Vector2> vertices;
};

using Obstacle = std::variant<CircleObstacle, PolygonObstacle>;

/// Throws GeometryError for a non-positive radius or a polygon that is not
/// strictly convex and counter-clockwise.
void validate_obstacle(const Obstacle& o);

/// Distance from `p` to the obstacle boundary (0 on the boundary).
double boundary_distance(const Obstacle& o, const Vector2& p);

/// Nearest positive ray parameter where the ray hits the obstacle boundary.
std::optional<double> ray_intersect(const Obstacle& o, const Vector2& origin,
                                    const Vector2& direction);

struct WorldModel {
  std::vector<Obstacle> obstacles;
  Vector2 goal = Vector2::Zero();

  void validate() const;
};

struct ScanResult {
  std::vector<Vector2> points;  // robot frame
  double max_range = 0.0;
};

/// Optional zero-mean Gaussian perturbations. All zero means exact sensing.
struct SensorNoise {
  double lidar_range_std = 0.0;
  double camera_range_std = 0.0;
  double camera_bearing_std = 0.0;
};

/// Explicit Euler step of the unicycle model.
RobotState step_kinematics(const RobotState& s, const VelocityCmd& cmd,
                           double dt);

/// Pose-only form of step_kinematics.
Pose2D integrate_pose(const Pose2D& p, double v, double omega, double dt);

/// Casts `n_beams` rays at bearings -pi + 2*pi*k/n in the robot frame and
/// returns the nearest hit of each ray within `max_range`. Misses are
/// omitted.
ScanResult simulate_lidar(const RobotState& s, const WorldModel& w,
                          double max_range, std::size_t n_beams,
                          double range_noise_std = 0.0,
                          std::mt19937_64* rng = nullptr);

/// Relative pose of the leader seen through the follower's rotating camera,
/// or std::nullopt when the leader is out of range or outside the FOV.
std::optional<RelativePoseMeasurement> simulate_camera(
    const RobotState& follower, const Pose2D& leader, double fov,
    double max_range, const SensorNoise& noise = {},
    std::mt19937_64* rng = nullptr);

/// Deadband tracking law for the camera motor. `delta` is the angle from the
/// optical axis to the leader.
double rotate_camera(double delta, double deadband, double gain);

/// Lossless, instantaneous leader-to-follower link. A transmission copies
/// the leader's trajectory buffer to every subscriber.
class BroadcastChannel {
 public:
  explicit BroadcastChannel(std::size_t subscribers = 0,
                            std::size_t buffer_capacity = 1);

  std::size_t subscriber_count() const { return buffers_.size(); }
  const TrajectoryBuffer& buffer(std::size_t i) const { return buffers_[i]; }
  TrajectoryBuffer& buffer(std::size_t i) { return buffers_[i]; }

  /// Timestamps (step indices) of every transmission so far.
  const std::vector<long>& transmissions() const { return log_; }

  void record_transmission(long step, const TrajectoryBuffer& source);

 private:
  std::vector<TrajectoryBuffer> buffers_;
  std::vector<long> log_;
};

/// Sends `buffer` when the leader command changed or nothing has been sent
/// yet. Returns whether a transmission took place; otherwise subscribers are
/// expected to extrapolate their copies.
bool broadcast(bool leader_cmd_changed, const TrajectoryBuffer& buffer,
               BroadcastChannel& ch, long step);

}  // namespace cotransport

#endif  // COTRANSPORT_WORLD_H_
