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

#include "cotransport/controller.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace cotransport {
namespace {

TEST(Tracking, ZeroErrorPassesReferenceThrough) {
  const VelocityCmd c = tracking_control({0, 0, 0}, {0.5, 0.4}, ControlGains{});
  EXPECT_EQ(c.v, 0.5);
  EXPECT_EQ(c.omega, 0.4);
}

TEST(Tracking, ClosedFormExample) {
  const VelocityCmd c = tracking_control({3, 4, 0}, {0.5, 0.0}, ControlGains{});
  EXPECT_NEAR(c.v, 0.5 + 0.4 * 3 / std::sqrt(26.0), 1e-15);
  EXPECT_NEAR(c.v, 0.7353, 5e-5);
  EXPECT_NEAR(c.omega, 0.2746, 5e-5);
  const VelocityCmd far = tracking_control({1e9, 0, 0}, {0.5, 0.0}, ControlGains{});
  EXPECT_NEAR(far.v, 0.9, 1e-8);
}

TEST(Tracking, StaysInsideEnvelope) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> e(-50.0, 50.0), th(-kPi, kPi), r(-1.0, 1.0);
  const ControlGains g;
  for (int i = 0; i < 10000; ++i) {
    const VelocityCmd ref{r(rng), r(rng)};
    const VelocityCmd c = tracking_control({e(rng), e(rng), th(rng)}, ref, g);
    EXPECT_LE(std::abs(c.v), std::abs(ref.v) + g.c1 + 1e-12);
    EXPECT_LE(std::abs(c.omega), std::abs(ref.omega) + g.c2 * std::abs(ref.v) + g.c3 + 1e-12);
  }
}

TEST(Saturation, Examples) {
  EXPECT_EQ(saturation(1.0, 1.8), 1.0);
  EXPECT_EQ(saturation(-1.8, 1.8), 1.0);
  EXPECT_DOUBLE_EQ(saturation(-3.0, 1.8), 0.6);
}

TEST(Preservation, Examples) {
  ControlGains g;
  EXPECT_EQ(preservation_control(Vector2::Zero(), 0.3, g).v, 0.0);
  EXPECT_EQ(preservation_control(Vector2::Zero(), 0.3, g).omega, 0.0);

  const VelocityCmd aligned = preservation_control(Vector2(0, 1), kPi / 2, g);
  EXPECT_DOUBLE_EQ(aligned.v, -0.2);
  EXPECT_EQ(aligned.omega, 0.0);

  // v_hat = -0.2 * 15 = -3 saturates to exactly -v_bar.
  const VelocityCmd big = preservation_control(Vector2(15, 0), 0.0, g);
  EXPECT_EQ(big.v, -1.8);

  // Heading error wraps: pi - 0.1 away on one side is -(pi + 0.1) on the other.
  g.k_omega_preserve = 0.2;
  const VelocityCmd wrap = preservation_control(Vector2(1, 0), kPi + 0.1, g);
  EXPECT_NEAR(wrap.omega, 0.2 * (kPi - 0.1), 1e-12);
}

TEST(Preservation, RespectsCaps) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> t(-100.0, 100.0), th(-kPi, kPi);
  const ControlGains g;
  for (int i = 0; i < 10000; ++i) {
    const VelocityCmd c = preservation_control(Vector2(t(rng), t(rng)), th(rng), g);
    EXPECT_LE(std::abs(c.v), g.v_bar);
    EXPECT_LE(std::abs(c.omega), g.omega_bar);
  }
}

TEST(Blend, Examples) {
  const VelocityCmd n{1.0, 0.3}, o{0.2, -0.5};
  BlendResult r = blend(n, o, 0.0, 0.5);
  EXPECT_EQ(r.state.mode, ProcessMode::kNormal);
  EXPECT_EQ(r.cmd.v, 1.0);
  r = blend(n, o, 0.25, 0.5);
  EXPECT_EQ(r.state.mode, ProcessMode::kTransition);
  EXPECT_DOUBLE_EQ(r.cmd.v, 0.6);
  r = blend(n, o, 0.5, 0.5);
  EXPECT_EQ(r.cmd.v, 0.2);
  EXPECT_EQ(r.cmd.omega, -0.5);
  r = blend(n, o, 0.7, 0.5);
  EXPECT_EQ(r.state.mode, ProcessMode::kPreservation);
  EXPECT_EQ(r.cmd.v, 0.2);
}

TEST(Blend, ContinuousAcrossModeSwitches) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const VelocityCmd n{u(rng), u(rng)}, o{u(rng), u(rng)};
    const double bt = 0.5;
    const BlendResult at0 = blend(n, o, 0.0, bt), near0 = blend(n, o, 1e-12, bt);
    EXPECT_NEAR(at0.cmd.v, near0.cmd.v, 1e-10);
    EXPECT_NEAR(at0.cmd.omega, near0.cmd.omega, 1e-10);
    const BlendResult below = blend(n, o, bt, bt), above = blend(n, o, bt + 1e-12, bt);
    EXPECT_EQ(below.cmd.v, above.cmd.v);
    EXPECT_EQ(below.cmd.omega, above.cmd.omega);
    const BlendResult mid = blend(n, o, 0.3, bt);
    EXPECT_LE(std::abs(mid.cmd.v), std::max(std::abs(n.v), std::abs(o.v)));
    EXPECT_LE(std::abs(mid.cmd.omega), std::max(std::abs(n.omega), std::abs(o.omega)));
  }
}

TEST(ValidateGains, Examples) {
  ControlGains lab;
  lab.c1 = 0.2;
  lab.v_bar = 1.2;
  lab.omega_bar = 1.2;
  LeaderParams lab_leader;
  lab_leader.v_nominal = 0.2;
  lab_leader.omega_nominal = 0.3;
  const std::vector<CurvilinearOffset> lab_offsets{{-1.0, 0.5}, {-1.0, -0.5}};
  EXPECT_TRUE(validate_gains(lab, lab_leader, lab_offsets).empty());

  ControlGains over = lab;
  over.c1 = over.v_bar;
  EXPECT_FALSE(validate_gains(over, lab_leader, lab_offsets).empty());

  LeaderParams sim_leader;
  sim_leader.v_nominal = 0.5;
  sim_leader.omega_nominal = 0.4;
  const std::vector<CurvilinearOffset> sim_offsets{{-1.0, 1.0}, {-1.0, -1.0}, {-2.0, 0.0}};
  EXPECT_TRUE(validate_gains(ControlGains{}, sim_leader, sim_offsets).empty());

  ControlGains slow;
  slow.omega_bar = 0.5;
  EXPECT_EQ(validate_gains(slow, sim_leader, sim_offsets).size(), 1u);
}

}  // namespace
}  // namespace cotransport
