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

#include "cotransport/payload_geometry.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cotransport {

void PayloadParams::validate() const {
  const double values[] = {mount_height, payload_height, min_safe_height,
                           suspension_radius, formation_radius};
  for (double v : values) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw FormationInfeasible("payload parameters must be positive");
    }
  }
  if (!(std::isfinite(cable_length) && cable_length >= 0.0)) {
    throw FormationInfeasible("cable length must be non-negative");
  }
  if (formation_radius < suspension_radius) {
    throw FormationInfeasible(
        "formation radius must not be smaller than the suspension radius");
  }
  if (!(mount_height > payload_height + min_safe_height)) {
    throw FormationInfeasible(
        "mount height leaves no room for the payload above its minimum "
        "safe height");
  }
}

double payload_clearance(const PayloadParams& p, double effective_radius) {
  const double offset = effective_radius - p.suspension_radius;
  // Small tolerance so that R = R_s + l evaluates instead of throwing.
  if (std::abs(offset) > p.cable_length * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "payload_clearance: cable stretched (|R - R_s| = " << std::abs(offset)
        << " > l = " << p.cable_length << ")";
    throw FormationInfeasible(msg.str());
  }
  const double drop =
      std::sqrt(std::max(0.0, p.cable_length * p.cable_length - offset * offset));
  return p.mount_height - p.payload_height - drop;
}

ScaleBounds scale_bounds(const PayloadParams& p) {
  p.validate();
  const double l = p.cable_length;
  const double k0 = p.mount_height - p.payload_height - p.min_safe_height;
  ScaleBounds sb;
  sb.r_min_radius = k0 > l ? p.suspension_radius
                           : p.suspension_radius + std::sqrt(l * l - k0 * k0);
  sb.r_minus = sb.r_min_radius / p.formation_radius;
  sb.r_plus = (l + p.suspension_radius) / p.formation_radius;
  if (sb.r_minus > 1.0 || sb.r_plus < 1.0) {
    std::ostringstream msg;
    msg << "nominal formation radius outside admissible annulus (r- = "
        << sb.r_minus << ", r+ = " << sb.r_plus << ")";
    throw FormationInfeasible(msg.str());
  }
  return sb;
}

DistanceBand pairwise_distance_bounds(const ScaleBounds& sb, double desired,
                                      double collision_distance,
                                      double camera_range) {
  if (!(desired > 0.0)) {
    throw FormationInfeasible("desired pairwise distance must be positive");
  }
  DistanceBand band{std::max(sb.r_minus * desired, collision_distance),
                    std::min(sb.r_plus * desired, camera_range)};
  if (band.lower >= band.upper) {
    std::ostringstream msg;
    msg << "empty pairwise distance band [" << band.lower << ", " << band.upper
        << "] for desired distance " << desired;
    throw FormationInfeasible(msg.str());
  }
  return band;
}

}  // namespace cotransport
