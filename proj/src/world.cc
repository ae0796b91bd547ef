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

#include "cotransport/world.h"

#include <algorithm>
#include <cmath>

namespace cotransport {

namespace {

double point_segment_distance(const Vector2& p, const Vector2& a,
                              const Vector2& b) {
  const Vector2 e = b - a;
  const double len2 = e.squaredNorm();
  double u = len2 > 0.0 ? (p - a).dot(e) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  return (p - (a + u * e)).norm();
}

struct RayVisitor {
  const Vector2& origin;
  const Vector2& dir;

  std::optional<double> operator()(const CircleObstacle& c) const {
    const Vector2 f = origin - c.center;
    const double b = f.dot(dir);
    const double cc = f.squaredNorm() - c.radius * c.radius;
    const double disc = b * b - cc;
    if (disc < 0.0) return std::nullopt;
    const double root = std::sqrt(disc);
    const double t_near = -b - root;
    const double t_far = -b + root;
    if (t_near > 0.0) return t_near;
    if (t_far > 0.0) return t_far;
    return std::nullopt;
  }

  std::optional<double> operator()(const PolygonObstacle& poly) const {
    std::optional<double> best;
    const auto& vs = poly.vertices;
    for (std::size_t k = 0; k < vs.size(); ++k) {
      const Vector2& a = vs[k];
      const Vector2 e = vs[(k + 1) % vs.size()] - a;
      const double denom = cross(dir, e);
      if (std::abs(denom) < 1e-15) continue;
      const Vector2 ao = a - origin;
      const double t = cross(ao, e) / denom;
      const double u = cross(ao, dir) / denom;
      if (t > 0.0 && u >= 0.0 && u <= 1.0 && (!best || t < *best)) best = t;
    }
    return best;
  }
};

}  // namespace

void validate_obstacle(const Obstacle& o) {
  if (const auto* c = std::get_if<CircleObstacle>(&o)) {
    if (!(c->radius > 0.0) || !c->center.allFinite()) {
      throw GeometryError("circle obstacle needs a finite center and radius > 0");
    }
    return;
  }
  const auto& vs = std::get<PolygonObstacle>(o).vertices;
  if (vs.size() < 3) {
    throw GeometryError("polygon obstacle needs at least 3 vertices");
  }
  for (std::size_t k = 0; k < vs.size(); ++k) {
    const Vector2& a = vs[k];
    const Vector2& b = vs[(k + 1) % vs.size()];
    const Vector2& c = vs[(k + 2) % vs.size()];
    if (!a.allFinite() || !(cross(b - a, c - b) > 0.0)) {
      throw GeometryError(
          "polygon obstacle must be strictly convex with counter-clockwise "
          "vertices");
    }
  }
}

double boundary_distance(const Obstacle& o, const Vector2& p) {
  if (const auto* c = std::get_if<CircleObstacle>(&o)) {
    return std::abs((p - c->center).norm() - c->radius);
  }
  const auto& vs = std::get<PolygonObstacle>(o).vertices;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < vs.size(); ++k) {
    best = std::min(best, point_segment_distance(p, vs[k], vs[(k + 1) % vs.size()]));
  }
  return best;
}

std::optional<double> ray_intersect(const Obstacle& o, const Vector2& origin,
                                    const Vector2& direction) {
  return std::visit(RayVisitor{origin, direction}, o);
}

void WorldModel::validate() const {
  for (const auto& o : obstacles) validate_obstacle(o);
  if (!goal.allFinite()) throw GeometryError("goal must be finite");
}

Pose2D integrate_pose(const Pose2D& p, double v, double omega, double dt) {
  Pose2D out;
  out.position = Vector2(p.position.x() + v * std::cos(p.heading) * dt,
                         p.position.y() + v * std::sin(p.heading) * dt);
  out.heading = wrap_angle(p.heading + omega * dt);
  return out;
}

RobotState step_kinematics(const RobotState& s, const VelocityCmd& cmd,
                           double dt) {
  if (!std::isfinite(cmd.v) || !std::isfinite(cmd.omega)) {
    throw GeometryError("step_kinematics: non-finite velocity command");
  }
  if (!(dt > 0.0)) {
    throw GeometryError("step_kinematics: dt must be positive");
  }
  RobotState out = s;
  out.pose = integrate_pose(s.pose, cmd.v, cmd.omega, dt);
  return out;
}

ScanResult simulate_lidar(const RobotState& s, const WorldModel& w,
                          double max_range, std::size_t n_beams,
                          double range_noise_std, std::mt19937_64* rng) {
  ScanResult scan;
  scan.max_range = max_range;
  if (n_beams < 8) {
    throw GeometryError("simulate_lidar: at least 8 beams required");
  }
  // Obstacles entirely out of range cannot produce a return.
  std::vector<const Obstacle*> nearby;
  for (const auto& o : w.obstacles) {
    if (boundary_distance(o, s.pose.position) <= max_range) nearby.push_back(&o);
  }
  if (nearby.empty()) return scan;
  const bool noisy = range_noise_std > 0.0 && rng != nullptr;
  std::normal_distribution<double> noise(0.0, noisy ? range_noise_std : 1.0);
  scan.points.reserve(n_beams);
  for (std::size_t k = 0; k < n_beams; ++k) {
    const double bearing = -kPi + kTwoPi * static_cast<double>(k) /
                                      static_cast<double>(n_beams);
    const double world_angle = s.pose.heading + bearing;
    const Vector2 dir(std::cos(world_angle), std::sin(world_angle));
    double range = std::numeric_limits<double>::infinity();
    for (const Obstacle* o : nearby) {
      if (auto t = ray_intersect(*o, s.pose.position, dir)) {
        range = std::min(range, *t);
      }
    }
    if (!(range <= max_range)) continue;
    if (noisy) range = std::clamp(range + noise(*rng), 0.0, max_range);
    scan.points.emplace_back(range * std::cos(bearing), range * std::sin(bearing));
  }
  return scan;
}

std::optional<RelativePoseMeasurement> simulate_camera(
    const RobotState& follower, const Pose2D& leader, double fov,
    double max_range, const SensorNoise& noise, std::mt19937_64* rng) {
  const Vector2 local = to_frame(follower.pose, leader.position);
  const double range = local.norm();
  if (range > max_range) return std::nullopt;
  const double bearing = std::atan2(local.y(), local.x());
  if (std::abs(wrap_angle(bearing - follower.camera_angle)) > 0.5 * fov) {
    return std::nullopt;
  }
  RelativePoseMeasurement m;
  m.relative_position = local;
  m.relative_heading = wrap_angle(leader.heading - follower.pose.heading);
  if (rng != nullptr &&
      (noise.camera_range_std > 0.0 || noise.camera_bearing_std > 0.0)) {
    std::normal_distribution<double> unit(0.0, 1.0);
    const double r = range + noise.camera_range_std * unit(*rng);
    const double b = bearing + noise.camera_bearing_std * unit(*rng);
    m.relative_position = Vector2(r * std::cos(b), r * std::sin(b));
  }
  return m;
}

double rotate_camera(double delta, double deadband, double gain) {
  if (std::abs(delta) <= deadband) return 0.0;
  return gain * (delta - deadband * sgn(delta - deadband));
}

BroadcastChannel::BroadcastChannel(std::size_t subscribers,
                                   std::size_t buffer_capacity)
    : buffers_(subscribers, TrajectoryBuffer(buffer_capacity)) {}

void BroadcastChannel::record_transmission(long step,
                                           const TrajectoryBuffer& source) {
  for (auto& b : buffers_) b = source;
  log_.push_back(step);
}

bool broadcast(bool leader_cmd_changed, const TrajectoryBuffer& buffer,
               BroadcastChannel& ch, long step) {
  if (buffer.empty()) {
    throw Error("broadcast: empty trajectory buffer");
  }
  if (!leader_cmd_changed && !ch.transmissions().empty()) return false;
  ch.record_transmission(step, buffer);
  return true;
}

}  // namespace cotransport
