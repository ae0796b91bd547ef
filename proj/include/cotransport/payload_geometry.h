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

#ifndef COTRANSPORT_PAYLOAD_GEOMETRY_H_
#define COTRANSPORT_PAYLOAD_GEOMETRY_H_

#include "cotransport/geometry.h"

namespace cotransport {

/// Raised at configuration time when no formation scale keeps the payload
/// clear of the ground without stretching the cables, or when a pairwise
/// distance band is empty.
class FormationInfeasible : public Error {
 public:
  using Error::Error;
};

/// Physical parameters of the cable-suspended payload. Lengths in meters.
struct PayloadParams {
  double cable_length = 0.0;       // l
  double mount_height = 0.0;       // d
  double payload_height = 0.0;     // h0
  double min_safe_height = 0.0;    // h_min
  double suspension_radius = 0.0;  // R_s
  double formation_radius = 0.0;   // R_f

  /// Throws FormationInfeasible when the parameters cannot describe a
  /// carriable payload.
  void validate() const;
};

struct ScaleBounds {
  double r_min_radius = 0.0;  // smallest admissible formation radius
  double r_minus = 0.0;
  double r_plus = 0.0;
};

struct DistanceBand {
  double lower = 0.0;
  double upper = 0.0;
};

/// Height of the payload's lowest point above ground when the robots sit on
/// a circle of radius `effective_radius`. Negative means grounded.
double payload_clearance(const PayloadParams& p, double effective_radius);

/// Admissible annulus of formation radii expressed as ratios of R_f.
ScaleBounds scale_bounds(const PayloadParams& p);

/// Merges the scale annulus, the inter-robot collision distance and the
/// camera range into one band on ||p_ij|| for a pair with the given desired
/// distance.
DistanceBand pairwise_distance_bounds(const ScaleBounds& sb, double desired,
                                      double collision_distance,
                                      double camera_range);

}  // namespace cotransport

#endif  // COTRANSPORT_PAYLOAD_GEOMETRY_H_
