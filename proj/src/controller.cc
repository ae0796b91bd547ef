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

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cotransport {

const char* to_string(ProcessMode m) {
  switch (m) {
    case ProcessMode::kNormal:
      return "normal";
    case ProcessMode::kTransition:
      return "transition";
    case ProcessMode::kPreservation:
      return "preservation";
  }
  return "?";
}

TrackingError tracking_error(const Pose2D& desired_local) {
  return TrackingError{desired_local.x(), desired_local.y(), desired_local.heading};
}

VelocityCmd tracking_control(const TrackingError& err, const VelocityCmd& ref,
                             const ControlGains& g) {
  const double scale = std::sqrt(1.0 + err.x * err.x + err.y * err.y);
  const double half = 0.5 * err.theta;
  VelocityCmd out;
  out.v = ref.v + g.c1 * err.x / scale;
  out.omega = ref.omega +
              g.c2 * ref.v * (err.y * std::cos(half) - err.x * std::sin(half)) / scale +
              g.c3 * std::sin(half);
  return out;
}

double saturation(double x, double y) {
  if (std::abs(x) <= y) return 1.0;
  return y / std::abs(x);
}

VelocityCmd preservation_control(const Vector2& tau, double heading,
                                 const ControlGains& g) {
  const double norm = tau.norm();
  if (!(norm > 0.0)) return {};
  const double direction = std::atan2(tau.y(), tau.x());
  const double err = wrap_angle(heading - direction);
  const double v_hat = -g.k_v_preserve * std::cos(err) * norm;
  const double w_hat = -g.k_omega_preserve * err;
  // sat(x, y) * x, which is exactly +-y once saturated.
  auto scaled = [](double x, double cap) {
    return saturation(x, cap) < 1.0 ? std::copysign(cap, x) : x;
  };
  return VelocityCmd{scaled(v_hat, g.v_bar), scaled(w_hat, g.omega_bar)};
}

BlendResult blend(const VelocityCmd& tracking, const VelocityCmd& preserve,
                  double beta, double beta_threshold) {
  BlendResult r;
  r.state.beta = beta;
  if (beta <= 0.0) {
    r.cmd = tracking;
    r.state.mode = ProcessMode::kNormal;
    return r;
  }
  if (beta > beta_threshold) {
    r.cmd = preserve;
    r.state.mode = ProcessMode::kPreservation;
    r.state.weight_tracking = 0.0;
    r.state.weight_preserve = 1.0;
    return r;
  }
  const double w_o = beta / beta_threshold;
  const double w_n = (beta_threshold - beta) / beta_threshold;
  // The mix lies between the two inputs; clamping only removes rounding.
  auto mix = [w_n, w_o](double a, double b) {
    return std::clamp(w_n * a + w_o * b, std::min(a, b), std::max(a, b));
  };
  r.cmd.v = mix(tracking.v, preserve.v);
  r.cmd.omega = mix(tracking.omega, preserve.omega);
  r.state.mode = ProcessMode::kTransition;
  r.state.weight_tracking = w_n;
  r.state.weight_preserve = w_o;
  return r;
}

std::vector<std::string> validate_gains(const ControlGains& g,
                                        const LeaderParams& leader,
                                        std::span<const CurvilinearOffset> offsets) {
  std::vector<std::string> out;
  auto report = [&out](const std::string& what, double lhs, double rhs) {
    std::ostringstream s;
    s << what << ": " << lhs << " > " << rhs;
    out.push_back(s.str());
  };
  if (!(g.c1 > 0.0 && g.c2 > 0.0 && g.c3 > 0.0)) {
    out.emplace_back("tracking gains c1, c2, c3 must be positive");
  }
  if (!(g.k_v_preserve > 0.0 && g.k_omega_preserve > 0.0)) {
    out.emplace_back("preservation gains must be positive");
  }
  if (!(g.beta_threshold > 0.0 && g.beta_threshold < 1.0)) {
    out.emplace_back("beta threshold must lie in (0, 1)");
  }
  if (leader.v_nominal > g.v_bar) {
    report("leader speed exceeds v_bar", leader.v_nominal, g.v_bar);
  }
  if (leader.omega_nominal > g.omega_bar) {
    report("leader turn rate exceeds w_bar", leader.omega_nominal, g.omega_bar);
  }
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const double v_need =
        leader.v_nominal + leader.omega_nominal * std::abs(offsets[i].q) + g.c1;
    if (v_need > g.v_bar) {
      report("follower " + std::to_string(i) + " linear envelope v~ + w~|q| + c1",
             v_need, g.v_bar);
    }
  }
  const double w_need = leader.omega_nominal + g.c2 * leader.v_nominal + g.c3;
  if (w_need > g.omega_bar) {
    report("angular envelope w~ + c2 v~ + c3", w_need, g.omega_bar);
  }
  return out;
}

}  // namespace cotransport
