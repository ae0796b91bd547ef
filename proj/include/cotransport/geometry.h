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

#ifndef COTRANSPORT_GEOMETRY_H_
#define COTRANSPORT_GEOMETRY_H_

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace cotransport {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad numeric input to a geometric primitive.
class GeometryError : public Error {
 public:
  using Error::Error;
};

using Vector2 = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Planar pose. Heading is kept in (-pi, pi].
struct Pose2D {
  Vector2 position = Vector2::Zero();
  double heading = 0.0;

  Pose2D() = default;
  Pose2D(double x, double y, double theta);
  Pose2D(const Vector2& p, double theta);

  double x() const { return position.x(); }
  double y() const { return position.y(); }
};

/// Relative pose of a target as seen from an observer frame.
struct RelativePoseMeasurement {
  Vector2 relative_position = Vector2::Zero();
  double relative_heading = 0.0;
};

struct VelocityCmd {
  double v = 0.0;
  double omega = 0.0;

  friend bool operator==(const VelocityCmd&, const VelocityCmd&) = default;
};

/// Maps any finite angle into (-pi, pi]. Throws GeometryError otherwise.
double wrap_angle(double a);

/// sgn(x) = x/|x| for x != 0, and 0 at 0.
inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// 2D cross product a.x*b.y - a.y*b.x.
inline double cross(const Vector2& a, const Vector2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Quarter turn counter-clockwise: G * v with G = [0 -1; 1 0].
inline Vector2 perp(const Vector2& v) { return Vector2(-v.y(), v.x()); }

inline Vector2 rotate(const Vector2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Vector2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

/// Expresses a world point in the observer's body frame.
Vector2 to_frame(const Pose2D& observer, const Vector2& world_point);

/// Inverse of to_frame.
Vector2 from_frame(const Pose2D& observer, const Vector2& local_point);

/// Pose composition a (+) b: b is expressed in a's frame.
Pose2D compose(const Pose2D& a, const Pose2D& b);

/// Inverse pose: compose(p, inverse(p)) is the identity.
Pose2D inverse(const Pose2D& p);

/// Pose of `target` expressed in `observer`'s frame.
Pose2D relative_pose(const Pose2D& observer, const Pose2D& target);

/// Perpendicular distance from p_o to the segment p_i -> p_j, defined only
/// while p_o lies in the open strip swept perpendicular to the segment.
/// Returns std::nullopt when p_o is outside that strip. Throws
/// GeometryError when p_i == p_j.
std::optional<double> segment_clearance(const Vector2& p_o, const Vector2& p_i,
                                        const Vector2& p_j);

/// Clearance used for link constraints: segment_clearance inside the strip,
/// otherwise the smaller of the two endpoint distances.
double link_clearance(const Vector2& p_o, const Vector2& p_i,
                      const Vector2& p_j);

}  // namespace cotransport

#endif  // COTRANSPORT_GEOMETRY_H_
