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

#include "cotransport/leader_navigation.h"

#include <cmath>
#include <limits>
#include <sstream>

namespace cotransport {

std::vector<std::string> LeaderParams::check(double lidar_range,
                                             double formation_radius) const {
  std::vector<std::string> out;
  auto fail = [&out](const std::string& what, double lhs, double rhs) {
    std::ostringstream s;
    s << what << " (" << lhs << " vs " << rhs << ")";
    out.push_back(s.str());
  };
  if (!(v_nominal > 0.0 && omega_nominal > 0.0 && prediction_horizon > 0.0)) {
    out.emplace_back("leader speeds and prediction horizon must be positive");
    return out;
  }
  const double radius = v_nominal / omega_nominal;
  if (!(radius < safe_distance)) {
    fail("v/w < d_o violated", radius, safe_distance);
  }
  if (!(safe_distance < turn_distance - 2.0 * radius)) {
    fail("d_o < d_t - 2v/w violated", safe_distance, turn_distance - 2.0 * radius);
  }
  if (!(turn_distance < lidar_range)) {
    fail("d_t - 2v/w < d_r - 2v/w violated", turn_distance, lidar_range);
  }
  if (!(turn_distance > formation_radius)) {
    fail("d_t > R_f violated", turn_distance, formation_radius);
  }
  return out;
}

double speed_profile(double rho_lo, double safe_distance, double turn_distance) {
  if (rho_lo >= turn_distance) return 1.0;
  if (rho_lo < safe_distance) return 0.0;
  return (rho_lo - safe_distance) / (turn_distance - safe_distance);
}

namespace {

double nearest_distance(const ScanResult& scan, const Vector2& from) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pt : scan.points) {
    best = std::min(best, (pt - from).squaredNorm());
  }
  return std::sqrt(best);
}

}  // namespace

int predict_flag(const ScanResult& scan, double v, double horizon) {
  if (scan.points.empty()) return 1;
  // The scan is in the leader frame, so straight-ahead motion is along +x.
  const double now = nearest_distance(scan, Vector2::Zero());
  const double later = nearest_distance(scan, Vector2(v * horizon, 0.0));
  return static_cast<int>(sgn(later - now));
}

LeaderDecision leader_step(const ScanResult& scan, const Pose2D& pose,
                           const Vector2& goal, const LeaderParams& p) {
  LeaderDecision d;
  d.rho_lo = std::numeric_limits<double>::infinity();
  double best2 = std::numeric_limits<double>::infinity();
  for (const auto& pt : scan.points) {
    const double r2 = pt.squaredNorm();
    if (r2 < best2) {
      best2 = r2;
      d.alpha_lo = std::atan2(pt.y(), pt.x());
    }
  }
  if (!scan.points.empty()) d.rho_lo = std::sqrt(best2);

  const Vector2 to_goal = goal - pose.position;
  d.alpha_g = wrap_angle(std::atan2(to_goal.y(), to_goal.x()) - pose.heading);

  d.cmd.v = speed_profile(d.rho_lo, p.safe_distance, p.turn_distance) * p.v_nominal;
  d.flag = predict_flag(scan, d.cmd.v, p.prediction_horizon);

  if (d.rho_lo > p.turn_distance) {
    d.branch = LeaderBranch::kFree;
    d.cmd.omega = p.omega_nominal * sgn(d.alpha_g);
  } else if (d.flag > 0) {
    d.branch = LeaderBranch::kReceding;
    d.cmd.omega = p.omega_nominal * sgn(d.alpha_g);
  } else if (d.alpha_lo < 0.0) {
    d.branch = LeaderBranch::kTurnPositive;
    d.cmd.omega = p.omega_nominal;
  } else {
    d.branch = LeaderBranch::kTurnNegative;
    d.cmd.omega = -p.omega_nominal;
  }
  return d;
}

}  // namespace cotransport
