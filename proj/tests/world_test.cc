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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cotransport/follower_trajectory.h"

namespace cotransport {
namespace {

constexpr double kNoHit = std::numeric_limits<double>::infinity();

RobotState at(double x, double y, double theta, double camera = 0.0) {
  RobotState s;
  s.pose = Pose2D(x, y, theta);
  s.camera_angle = camera;
  return s;
}

// Independent ray casts: closed-form circle roots and edge-by-edge
// parametric intersection.
double oracle_ray(const Obstacle& o, const Vector2& p, const Vector2& d) {
  if (const auto* c = std::get_if<CircleObstacle>(&o)) {
    const Vector2 m = p - c->center;
    const double b = m.dot(d);
    const double disc = b * b - (m.squaredNorm() - c->radius * c->radius);
    if (disc < 0.0) return kNoHit;
    const double s = std::sqrt(disc);
    if (-b - s > 0.0) return -b - s;
    if (-b + s > 0.0) return -b + s;
    return kNoHit;
  }
  const auto& v = std::get<PolygonObstacle>(o).vertices;
  double best = kNoHit;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vector2 a = v[i], e = v[(i + 1) % v.size()] - v[i];
    const double den = d.x() * e.y() - d.y() * e.x();
    if (std::abs(den) < 1e-15) continue;
    const Vector2 w = a - p;
    const double t = (w.x() * e.y() - w.y() * e.x()) / den;
    const double u = (w.x() * d.y() - w.y() * d.x()) / den;
    if (t > 0.0 && u >= 0.0 && u <= 1.0) best = std::min(best, t);
  }
  return best;
}

WorldModel test_map() {
  WorldModel w;
  w.obstacles.push_back(CircleObstacle{Vector2(7.0, 9.5), 1.5});
  w.obstacles.push_back(PolygonObstacle{{{13, 8}, {16, 8}, {16, 11}, {13, 11}}});
  w.obstacles.push_back(CircleObstacle{Vector2(15.0, 20.0), 1.2});
  w.obstacles.push_back(PolygonObstacle{{{20, 14}, {23, 15}, {21.5, 17.5}}});
  w.goal = Vector2(25, 25);
  return w;
}

TEST(Kinematics, Examples) {
  RobotState s = step_kinematics(at(0, 0, 0), {1.0, 0.0}, 0.1);
  EXPECT_NEAR(s.pose.x(), 0.1, 1e-15);
  EXPECT_EQ(s.pose.y(), 0.0);
  s = step_kinematics(at(0, 0, 0), {0.0, kPi}, 1.0);
  EXPECT_EQ(s.pose.position, Vector2::Zero());
  EXPECT_NEAR(s.pose.heading, kPi, 1e-15);
  EXPECT_THROW(step_kinematics(at(0, 0, 0), {std::nan(""), 0.0}, 0.1), Error);
}

TEST(Kinematics, EulerCircleCloses) {
  RobotState s = at(0, 0, 0);
  const int n = static_cast<int>(std::lround(kTwoPi / 0.01));
  for (int k = 0; k < n; ++k) s = step_kinematics(s, {1.0, 1.0}, 0.01);
  EXPECT_LT(s.pose.position.norm(), 0.05);
}

TEST(Lidar, EmptyAndSingleCircle) {
  WorldModel empty;
  EXPECT_TRUE(simulate_lidar(at(0, 0, 0), empty, 5.0, 360).points.empty());

  WorldModel w;
  w.obstacles.push_back(CircleObstacle{Vector2(2.0, 0.0), 0.5});
  const ScanResult scan = simulate_lidar(at(0, 0, 0), w, 5.0, 360);
  ASSERT_FALSE(scan.points.empty());
  const auto nearest = std::min_element(
      scan.points.begin(), scan.points.end(),
      [](const Vector2& a, const Vector2& b) { return a.norm() < b.norm(); });
  EXPECT_NEAR(nearest->norm(), 1.5, 1e-12);
  EXPECT_NEAR(std::atan2(nearest->y(), nearest->x()), 0.0, 1e-12);
}

TEST(Lidar, MatchesDenseRayOracleOnMap) {
  const WorldModel w = test_map();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 25.0), th(-kPi, kPi);
  int checked = 0;
  while (checked < 100) {
    const RobotState s = at(u(rng), u(rng), th(rng));
    double truth = kNoHit;
    for (const auto& o : w.obstacles) truth = std::min(truth, boundary_distance(o, s.pose.position));
    if (truth < 0.3 || truth > 7.0) continue;
    ++checked;
    const std::size_t n = 360;
    const ScanResult scan = simulate_lidar(s, w, 8.0, n);
    // Soundness: every return sits on a boundary and within range.
    for (const auto& p : scan.points) {
      EXPECT_LE(p.norm(), 8.0 + 1e-12);
      const Vector2 world = from_frame(s.pose, p);
      double on = kNoHit;
      for (const auto& o : w.obstacles) on = std::min(on, boundary_distance(o, world));
      EXPECT_LT(on, 1e-6);
    }
    // Same bearings through the oracle.
    double oracle_min = kNoHit;
    std::size_t oracle_hits = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double bearing = -kPi + kTwoPi * static_cast<double>(k) / static_cast<double>(n);
      const double a = s.pose.heading + bearing;
      const Vector2 d(std::cos(a), std::sin(a));
      double hit = kNoHit;
      for (const auto& o : w.obstacles) hit = std::min(hit, oracle_ray(o, s.pose.position, d));
      if (hit <= 8.0) {
        ++oracle_hits;
        oracle_min = std::min(oracle_min, hit);
      }
    }
    double scan_min = kNoHit;
    for (const auto& p : scan.points) scan_min = std::min(scan_min, p.norm());
    EXPECT_EQ(scan.points.size(), oracle_hits);
    EXPECT_NEAR(scan_min, oracle_min, 1e-9);
    // The nearest boundary point lies within half a beam spacing of some
    // ray, so the overshoot is bounded by one spacing of arc.
    EXPECT_GE(scan_min, truth - 1e-9);
    EXPECT_LE(scan_min, truth * (1.0 + kTwoPi / n));
  }
}

TEST(Lidar, SeededNoiseIsReproducible) {
  const WorldModel w = test_map();
  std::mt19937_64 a(9), b(9);
  const ScanResult s1 = simulate_lidar(at(5, 5, 0.3), w, 8.0, 360, 0.01, &a);
  const ScanResult s2 = simulate_lidar(at(5, 5, 0.3), w, 8.0, 360, 0.01, &b);
  ASSERT_EQ(s1.points.size(), s2.points.size());
  for (std::size_t i = 0; i < s1.points.size(); ++i) EXPECT_EQ(s1.points[i], s2.points[i]);
}

TEST(Camera, Examples) {
  const auto m = simulate_camera(at(0, 0, 0), Pose2D(1, 0, 0.3), kPi / 2, 5.0);
  ASSERT_TRUE(m.has_value());
  EXPECT_NEAR(m->relative_position.x(), 1.0, 1e-15);
  EXPECT_NEAR(m->relative_position.y(), 0.0, 1e-15);
  EXPECT_NEAR(m->relative_heading, 0.3, 1e-15);

  const double fov = 1.6;
  const double b = fov / 2 + 0.01;
  EXPECT_FALSE(simulate_camera(at(0, 0, 0), Pose2D(std::cos(b), std::sin(b), 0), fov, 5.0));
  EXPECT_FALSE(simulate_camera(at(0, 0, 0), Pose2D(6, 0, 0), kPi / 2, 5.0));
  // The optical axis follows the camera angle.
  EXPECT_TRUE(simulate_camera(at(0, 0, 0, kPi / 2), Pose2D(0, 2, 0), 0.5, 5.0));
  EXPECT_FALSE(simulate_camera(at(0, 0, 0, kPi / 2), Pose2D(2, 0, 0), 0.5, 5.0));
}

TEST(Camera, GatingMatchesBruteForce) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-6.0, 6.0), th(-kPi, kPi);
  int visible = 0;
  for (int i = 0; i < 5000; ++i) {
    const RobotState f = at(u(rng), u(rng), th(rng), th(rng));
    const Pose2D leader(u(rng), u(rng), th(rng));
    const double fov = 1.6, range = 5.0;
    const Vector2 d = leader.position - f.pose.position;
    const double axis = f.pose.heading + f.camera_angle;
    const double off = std::abs(std::remainder(std::atan2(d.y(), d.x()) - axis, kTwoPi));
    const bool expect = d.norm() <= range && off <= fov / 2;
    const auto m = simulate_camera(f, leader, fov, range);
    EXPECT_EQ(m.has_value(), expect) << i;
    if (m) {
      ++visible;
      EXPECT_LT((from_frame(f.pose, m->relative_position) - leader.position).norm(), 1e-12);
    }
  }
  EXPECT_GT(visible, 100);
}

TEST(Camera, RotationLaw) {
  EXPECT_EQ(rotate_camera(0.3, 0.5, 0.2), 0.0);
  EXPECT_EQ(rotate_camera(-0.5, 0.5, 0.2), 0.0);
  EXPECT_NEAR(rotate_camera(0.5 + 1e-6, 0.5, 0.2), 0.2e-6, 1e-15);
  EXPECT_NEAR(rotate_camera(-1.0, 0.5, 0.2), -0.1, 1e-15);
  EXPECT_NEAR(rotate_camera(1.0, 0.5, 0.2), 0.1, 1e-15);
}

LeaderSample sample(double t, double x, double v, double w) {
  return LeaderSample{Pose2D(x, 0, 0), v, w, t};
}

TEST(Broadcast, ConstantVelocitySendsOnce) {
  TrajectoryBuffer leader(50);
  BroadcastChannel ch(3, 50);
  for (long k = 0; k < 100; ++k) {
    leader.push(sample(0.02 * k, 0.01 * k, 0.5, 0.0));
    if (!broadcast(false, leader, ch, k)) {
      for (std::size_t i = 0; i < ch.subscriber_count(); ++i) {
        extrapolate_in_place(ch.buffer(i), 0.02);
      }
    }
  }
  EXPECT_EQ(ch.transmissions(), std::vector<long>{0});
}

TEST(Broadcast, ChangesTriggerSends) {
  TrajectoryBuffer leader(20);
  BroadcastChannel ch(2, 20);
  for (long k = 0; k < 8; ++k) {
    leader.push(sample(0.02 * k, 0.01 * k, k < 3 ? 0.5 : 0.4, k < 7 ? 0.0 : 0.2));
    broadcast(k == 3 || k == 7, leader, ch, k);
  }
  EXPECT_EQ(ch.transmissions(), (std::vector<long>{0, 3, 7}));
  EXPECT_EQ(ch.buffer(0), leader);
  EXPECT_EQ(ch.buffer(1), leader);
}

}  // namespace
}  // namespace cotransport
