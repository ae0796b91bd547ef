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

#include <algorithm>
#include <limits>
#include <cmath>

namespace cotransport {

Pose2D::Pose2D(double x, double y, double theta)
    : position(x, y), heading(wrap_angle(theta)) {}

Pose2D::Pose2D(const Vector2& p, double theta)
    : position(p), heading(wrap_angle(theta)) {}

double wrap_angle(double a) {
  if (!std::isfinite(a)) {
    throw GeometryError("wrap_angle: non-finite angle");
  }
  double r = std::remainder(a, kTwoPi);
  // remainder() lands in [-pi, pi]; the lower end belongs to +pi. Values
  // within a few ulps of -pi come from inputs that are odd multiples of pi
  // up to rounding, so they snap to +pi as well.
  if (r <= -kPi + 4.0 * std::numeric_limits<double>::epsilon()) {
    r += kTwoPi;
  }
  return std::min(r, kPi);
}

Vector2 to_frame(const Pose2D& observer, const Vector2& world_point) {
  return rotate(world_point - observer.position, -observer.heading);
}

Vector2 from_frame(const Pose2D& observer, const Vector2& local_point) {
  return observer.position + rotate(local_point, observer.heading);
}

Pose2D compose(const Pose2D& a, const Pose2D& b) {
  return Pose2D(from_frame(a, b.position), a.heading + b.heading);
}

Pose2D inverse(const Pose2D& p) {
  return Pose2D(rotate(-p.position, -p.heading), -p.heading);
}

Pose2D relative_pose(const Pose2D& observer, const Pose2D& target) {
  return Pose2D(to_frame(observer, target.position),
                target.heading - observer.heading);
}

std::optional<double> segment_clearance(const Vector2& p_o, const Vector2& p_i,
                                        const Vector2& p_j) {
  const Vector2 d = p_j - p_i;
  const double len = d.norm();
  if (!(len > 0.0)) {
    throw GeometryError("segment_clearance: coincident segment endpoints");
  }
  if (!((p_o - p_i).dot(d) > 0.0 && (p_o - p_j).dot(d) < 0.0)) {
    return std::nullopt;
  }
  return std::abs(cross(d, p_o - p_i)) / len;
}

double link_clearance(const Vector2& p_o, const Vector2& p_i,
                      const Vector2& p_j) {
  if (auto c = segment_clearance(p_o, p_i, p_j)) {
    return *c;
  }
  return std::min((p_o - p_i).norm(), (p_o - p_j).norm());
}

}  // namespace cotransport
