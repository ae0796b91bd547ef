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

#include "cotransport/geometry.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace cotransport {
namespace {

TEST(WrapAngle, Examples) {
  EXPECT_EQ(wrap_angle(0.0), 0.0);
  EXPECT_NEAR(wrap_angle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_angle(-1.5 * kPi), 0.5 * kPi, 1e-12);
  EXPECT_EQ(wrap_angle(kPi), kPi);
  EXPECT_EQ(wrap_angle(-kPi), kPi);
  EXPECT_THROW(wrap_angle(std::numeric_limits<double>::quiet_NaN()), GeometryError);
  EXPECT_THROW(wrap_angle(std::numeric_limits<double>::infinity()), GeometryError);
}

TEST(WrapAngle, RangeAndIdempotence) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(-100.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = a(rng);
    const double w = wrap_angle(x);
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
    EXPECT_EQ(wrap_angle(w), w);
    EXPECT_NEAR(std::remainder(x - w, kTwoPi), 0.0, 1e-9);
  }
}

TEST(Frames, Examples) {
  EXPECT_TRUE(to_frame(Pose2D(), Vector2(1, 2)).isApprox(Vector2(1, 2)));
  const Vector2 p = to_frame(Pose2D(1, 0, kPi / 2), Vector2(1, 1));
  EXPECT_NEAR(p.x(), 1.0, 1e-12);
  EXPECT_NEAR(p.y(), 0.0, 1e-12);
}

TEST(Frames, RoundTripAndIsometry) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const Pose2D f(u(rng), u(rng), wrap_angle(u(rng)));
    const Vector2 a(u(rng), u(rng)), b(u(rng), u(rng));
    EXPECT_LT((from_frame(f, to_frame(f, a)) - a).norm(), 1e-12);
    EXPECT_NEAR((to_frame(f, a) - to_frame(f, b)).norm(), (a - b).norm(), 1e-12);
  }
}

TEST(Poses, ComposeInverseRelative) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const Pose2D a(u(rng), u(rng), wrap_angle(u(rng)));
    const Pose2D b(u(rng), u(rng), wrap_angle(u(rng)));
    const Pose2D id = compose(a, inverse(a));
    EXPECT_LT(id.position.norm(), 1e-12);
    EXPECT_NEAR(id.heading, 0.0, 1e-12);
    const Pose2D rel = relative_pose(a, b);
    const Pose2D back = compose(a, rel);
    EXPECT_LT((back.position - b.position).norm(), 1e-12);
    EXPECT_NEAR(wrap_angle(back.heading - b.heading), 0.0, 1e-12);
  }
  EXPECT_EQ(Pose2D(0, 0, 3 * kPi).heading, kPi);
}

TEST(SegmentClearance, Examples) {
  EXPECT_NEAR(*segment_clearance(Vector2(1, 1), Vector2(0, 0), Vector2(2, 0)), 1.0, 1e-15);
  EXPECT_FALSE(segment_clearance(Vector2(3, 1), Vector2(0, 0), Vector2(2, 0)).has_value());
  EXPECT_NEAR(*segment_clearance(Vector2(0.7, 0), Vector2(0, 0), Vector2(2, 0)), 0.0, 1e-15);
  EXPECT_NEAR(*segment_clearance(Vector2(1, -1), Vector2(0, 0), Vector2(2, 0)), 1.0, 1e-15);
  EXPECT_THROW(segment_clearance(Vector2(1, 1), Vector2(2, 2), Vector2(2, 2)), GeometryError);
  EXPECT_NEAR(link_clearance(Vector2(3, 1), Vector2(0, 0), Vector2(2, 0)), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(link_clearance(Vector2(-1, 0), Vector2(0, 0), Vector2(2, 0)), 1.0, 1e-15);
}

TEST(SegmentClearance, MatchesSampledMinimum) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int checked = 0;
  while (checked < 100) {
    const Vector2 pi(u(rng), u(rng)), pj(u(rng), u(rng)), po(u(rng), u(rng));
    if ((pj - pi).norm() < 0.1) continue;
    const auto d = segment_clearance(po, pi, pj);
    if (!d) continue;
    // Sample the segment densely around the projection, where the minimum
    // lies, so the sampling error stays below the tolerance.
    const Vector2 ab = pj - pi;
    const double t0 = (po - pi).dot(ab) / ab.squaredNorm();
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 10000; ++k) {
      const double t = std::clamp(t0 + (k - 5000) * 1e-8, 0.0, 1.0);
      best = std::min(best, (pi + t * ab - po).norm());
    }
    EXPECT_NEAR(*d, best, 1e-9);
    ++checked;
  }
}

}  // namespace
}  // namespace cotransport
