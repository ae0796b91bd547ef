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

#ifndef COTRANSPORT_LEADER_NAVIGATION_H_
#define COTRANSPORT_LEADER_NAVIGATION_H_

#include <string>
#include <vector>

#include "cotransport/geometry.h"
#include "cotransport/world.h"

namespace cotransport {

/// Reactive guidance parameters for the leader.
struct LeaderParams {
  double v_nominal = 0.5;      // cruise speed
  double omega_nominal = 0.4;  // fixed turn rate magnitude
  double turn_distance = 2.5;  // d_t: obstacle distance that starts avoidance
  double safe_distance = 0.5;  // d_o: speed reaches zero below this
  double prediction_horizon = 0.5;

  /// Returns the violated items of the parameter chain
  ///   v/w < d_o < d_t - 2v/w < d_r - 2v/w,  d_t > R_f
  /// as readable strings. Empty means valid.
  std::vector<std::string> check(double lidar_range,
                                 double formation_radius) const;
};

/// Which branch of the guidance rule produced the command.
enum class LeaderBranch { kFree, kReceding, kTurnPositive, kTurnNegative };

struct LeaderDecision {
  VelocityCmd cmd;
  double rho_lo = 0.0;    // distance to nearest scan point (inf if none)
  double alpha_lo = 0.0;  // bearing of nearest scan point
  double alpha_g = 0.0;   // bearing of the goal
  int flag = 0;           // sign of predicted change of rho_lo
  LeaderBranch branch = LeaderBranch::kFree;
};

/// Linear slow-down factor in [0, 1].
double speed_profile(double rho_lo, double safe_distance, double turn_distance);

/// Sign of the change in nearest-obstacle distance after moving straight
/// ahead for `horizon` seconds at speed `v`, measured against the same scan.
/// An empty scan yields +1.
int predict_flag(const ScanResult& scan, double v, double horizon);

/// One guidance step. `scan` is in the leader frame, `goal` in the world.
LeaderDecision leader_step(const ScanResult& scan, const Pose2D& pose,
                           const Vector2& goal, const LeaderParams& p);

}  // namespace cotransport

#endif  // COTRANSPORT_LEADER_NAVIGATION_H_
