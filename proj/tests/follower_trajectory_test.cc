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

#include "cotransport/follower_trajectory.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cotransport/world.h"

namespace cotransport {
namespace {

// Leader at 0.5 m/s along +x, one sample per second, ending at x = 5.
TrajectoryBuffer straight_line() {
  TrajectoryBuffer b(100);
  for (int k = 0; k <= 10; ++k) b.push(LeaderSample{Pose2D(0.5 * k, 0, 0), 0.5, 0.0, 1.0 * k});
  return b;
}

// Leader on a circle of radius 2 around (0, 2), half a turn.
TrajectoryBuffer half_circle(int n) {
  TrajectoryBuffer b(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double phi = kPi * k / n;
    b.push(LeaderSample{Pose2D(2 * std::sin(phi), 2 * (1 - std::cos(phi)), phi), 1.0, 0.5,
                        2.0 * phi});
  }
  return b;
}

TEST(ReferencePoint, StraightPath) {
  const TrajectoryBuffer b = straight_line();
  const ReferencePoint r = locate_reference_point(b, {-1.0, 0.5});
  EXPECT_NEAR(r.pose.x(), 4.0, 1e-12);
  EXPECT_EQ(r.pose.y(), 0.0);
  EXPECT_EQ(r.pose.heading, 0.0);
  EXPECT_NEAR(r.t_a, 8.0, 1e-12);

  const ReferencePoint now = locate_reference_point(b, {0.0, 1.0});
  EXPECT_EQ(now.pose.x(), 5.0);
  EXPECT_EQ(now.t_a, 10.0);

  const ReferencePoint mid = locate_reference_point(b, {-1.25, 0.0});
  EXPECT_NEAR(mid.pose.x(), 3.75, 1e-12);
  EXPECT_NEAR(mid.t_a, 7.5, 1e-12);
}

TEST(ReferencePoint, QuarterArcOnCircle) {
  const TrajectoryBuffer b = half_circle(2000);
  const ReferencePoint r = locate_reference_point(b, {-kPi, 0.0});
  // Chords are slightly shorter than the arc, so the walk overshoots by a
  // relative amount of order (dphi)^2.
  EXPECT_NEAR(r.pose.x(), 2.0, 1e-5);
  EXPECT_NEAR(r.pose.y(), 2.0, 1e-5);
  EXPECT_NEAR(r.pose.heading, kPi / 2, 1e-5);
  EXPECT_NEAR(r.t_a, kPi, 1e-5);
}

TEST(ReferencePoint, Errors) {
  EXPECT_THROW(locate_reference_point(TrajectoryBuffer(4), {-1.0, 0.0}), StaleBuffer);
  EXPECT_THROW(locate_reference_point(straight_line(), {-5.01, 0.0}), StaleBuffer);
  EXPECT_NO_THROW(locate_reference_point(straight_line(), {-5.0, 0.0}));
  EXPECT_THROW(locate_reference_point(straight_line(), {0.1, 0.0}), Error);
}

TEST(DesiredPose, Example) {
  ReferencePoint ref{Pose2D(-1, 0, 0), 0.0, 0.5, 0.0};
  // Follower at (-2, 0) facing +x sees the leader at (2, 0).
  const Pose2D d = desired_pose(ref, {-1.0, 1.0}, {Vector2(2, 0), 0.0}, Pose2D(0, 0, 0));
  EXPECT_NEAR(d.x(), 1.0, 1e-12);
  EXPECT_NEAR(d.y(), 1.0, 1e-12);
  EXPECT_NEAR(d.heading, 0.0, 1e-12);
}

TEST(DesiredPose, ExactMeasurementGivesTargetInFollowerFrame) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-4.0, 4.0), th(-kPi, kPi);
  for (int i = 0; i < 500; ++i) {
    const Pose2D leader(u(rng), u(rng), th(rng));
    const Pose2D follower(u(rng), u(rng), th(rng));
    const ReferencePoint ref{Pose2D(u(rng), u(rng), th(rng)), 0.0, 0.0, 0.0};
    const CurvilinearOffset off{-1.0, u(rng)};
    const Pose2D rel = relative_pose(follower, leader);
    const Pose2D d = desired_pose(ref, off, {rel.position, rel.heading}, leader);
    const Vector2 target = ref.pose.position + off.q * Vector2(-std::sin(ref.pose.heading),
                                                               std::cos(ref.pose.heading));
    EXPECT_LT((from_frame(follower, d.position) - target).norm(), 1e-9);
    EXPECT_NEAR(wrap_angle(follower.heading + d.heading - ref.pose.heading), 0.0, 1e-9);
  }
}

TEST(ReferenceVelocities, Examples) {
  const VelocityCmd outer = reference_velocities(0.5, 0.4, -1.0);
  EXPECT_DOUBLE_EQ(outer.v, 0.9);
  EXPECT_EQ(outer.omega, 0.4);
  const VelocityCmd inner = reference_velocities(0.5, 0.4, 1.0);
  EXPECT_DOUBLE_EQ(inner.v, 0.1);
  EXPECT_EQ(inner.omega, 0.4);
}

TEST(ConcentricCircle, ReferenceRadius) {
  // Leader circling at v = 0.5, w = 0.4, radius 1.25 around (0, 1.25).
  const double dt = 0.02;
  TrajectoryBuffer b(2000);
  Pose2D p;
  for (int k = 0; k < 1500; ++k) {
    b.push(LeaderSample{p, 0.5, 0.4, k * dt});
    p = integrate_pose(p, 0.5, 0.4, dt);
  }
  for (double q : {-1.0, -0.5, 0.5}) {
    const ReferencePoint r = locate_reference_point(b, {-1.0, q});
    const Vector2 target = from_frame(r.pose, Vector2(0, q));
    // Explicit Euler spirals outward slightly; compare with the radius of
    // the sampled path itself at the reference point.
    const Vector2 center(0, 1.25);
    const double path_radius = (r.pose.position - center).norm();
    const double expected = path_radius - q;
    EXPECT_NEAR((target - center).norm(), expected, 0.01 * expected) << q;
    const VelocityCmd vr = reference_velocities(r.v, r.omega, q);
    EXPECT_NEAR(vr.v / vr.omega, 1.25 - q, 1e-12);
  }
}

TEST(Extrapolation, Examples) {
  TrajectoryBuffer b(3);
  b.push(LeaderSample{Pose2D(0, 0, 0), 1.0, 0.0, 0.0});
  extrapolate_in_place(b, 0.5);
  EXPECT_EQ(b.size(), 2u);
  EXPECT_DOUBLE_EQ(b.newest().pose.x(), 0.5);
  EXPECT_DOUBLE_EQ(b.newest().t, 0.5);
  extrapolate_in_place(b, 0.5);
  extrapolate_in_place(b, 0.5);
  EXPECT_EQ(b.size(), 3u);
  EXPECT_DOUBLE_EQ(b.oldest().t, 0.5);
  EXPECT_THROW(extrapolate_in_place(*std::make_unique<TrajectoryBuffer>(2), 0.1), Error);
  const TrajectoryBuffer c = extrapolate_buffer(b, 0.5);
  EXPECT_EQ(c.size(), 3u);
  EXPECT_DOUBLE_EQ(c.newest().t, 2.0);
  EXPECT_DOUBLE_EQ(b.newest().t, 1.5);
}

TEST(Extrapolation, MatchesTruthUnderConstantCommand) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> v(0.0, 1.0), w(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double vv = v(rng), ww = w(rng), dt = 0.02;
    TrajectoryBuffer truth(400), copy(400);
    RobotState s;
    truth.push(LeaderSample{s.pose, vv, ww, 0.0});
    copy = truth;
    for (int k = 1; k <= 300; ++k) {
      s = step_kinematics(s, {vv, ww}, dt);
      truth.push(LeaderSample{s.pose, vv, ww, truth.newest().t + dt});
      extrapolate_in_place(copy, dt);
    }
    ASSERT_EQ(copy.size(), truth.size());
    for (std::size_t k = 0; k < copy.size(); ++k) {
      EXPECT_LT((copy[k].pose.position - truth[k].pose.position).norm(), 1e-9);
      EXPECT_NEAR(wrap_angle(copy[k].pose.heading - truth[k].pose.heading), 0.0, 1e-9);
    }
  }
}

TEST(TrajectoryBuffer, CapacityAndOrdering) {
  TrajectoryBuffer b(3);
  for (int k = 0; k < 5; ++k) b.push(LeaderSample{Pose2D(k, 0, 0), 1, 0, 1.0 * k});
  EXPECT_EQ(b.size(), 3u);
  EXPECT_EQ(b.oldest().t, 2.0);
  EXPECT_EQ(b.newest().t, 4.0);
  EXPECT_DOUBLE_EQ(b.arc_length(), 2.0);
  EXPECT_THROW(b.push(LeaderSample{Pose2D(), 1, 0, 4.0}), Error);
}

TEST(BufferSizing, CapacityCoversOffsets) {
  const std::vector<CurvilinearOffset> offs{{-1.0, 1.0}, {-2.0, 0.0}};
  const std::size_t cap = default_buffer_capacity(offs, 0.1, 0.02);
  EXPECT_EQ(cap, 1252u);
  EXPECT_THROW(default_buffer_capacity(offs, 0.0, 0.02), Error);

  TrajectoryBuffer b(cap);
  const Pose2D start(1, 1, 0.5);
  seed_straight_history(b, start, 0.1, 0.02, 2.0);
  EXPECT_LT(b.newest().t, 0.0);
  b.push(LeaderSample{start, 0.1, 0.0, 0.0});
  EXPECT_GE(b.arc_length(), 2.0 - 1e-9);
  EXPECT_NO_THROW(locate_reference_point(b, offs[1]));
}

}  // namespace
}  // namespace cotransport
