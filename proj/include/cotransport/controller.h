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

#ifndef COTRANSPORT_CONTROLLER_H_
#define COTRANSPORT_CONTROLLER_H_

#include <span>
#include <string>
#include <vector>

#include "cotransport/follower_trajectory.h"
#include "cotransport/geometry.h"
#include "cotransport/leader_navigation.h"

namespace cotransport {

struct ControlGains {
  double c1 = 0.4;
  double c2 = 0.7;
  double c3 = 0.4;
  double k_v_preserve = 0.2;
  double k_omega_preserve = 2.0;
  double beta_threshold = 0.5;
  double v_bar = 1.8;
  double omega_bar = 1.8;
};

enum class ProcessMode { kNormal, kTransition, kPreservation };

const char* to_string(ProcessMode m);

struct ProcessState {
  ProcessMode mode = ProcessMode::kNormal;
  double beta = 0.0;
  double weight_tracking = 1.0;
  double weight_preserve = 0.0;
};

/// Tracking error of the follower toward its desired pose, in its own frame.
struct TrackingError {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// Error terms for a desired pose already expressed in the follower frame.
TrackingError tracking_error(const Pose2D& desired_local);

/// Bounded tracking law: |v| <= |v_r| + c1 and |w| <= |w_r| + c2|v_r| + c3.
VelocityCmd tracking_control(const TrackingError& err, const VelocityCmd& ref,
                             const ControlGains& g);

/// sat(x, y): 1 when |x| <= y, else y/|x|.
double saturation(double x, double y);

/// Descends the constraint potential: steers the heading onto the gradient
/// line and backs away along it. `tau` and `heading` share one frame.
VelocityCmd preservation_control(const Vector2& tau, double heading,
                                 const ControlGains& g);

struct BlendResult {
  VelocityCmd cmd;
  ProcessState state;
};

/// Selects the process from beta and mixes the two commands continuously.
BlendResult blend(const VelocityCmd& tracking, const VelocityCmd& preserve,
                  double beta, double beta_threshold);

/// Checks the actuator-feasibility chain for every follower lane. Returns
/// every violated inequality; empty means the gains are admissible.
std::vector<std::string> validate_gains(const ControlGains& g,
                                        const LeaderParams& leader,
                                        std::span<const CurvilinearOffset> offsets);

}  // namespace cotransport

#endif  // COTRANSPORT_CONTROLLER_H_
