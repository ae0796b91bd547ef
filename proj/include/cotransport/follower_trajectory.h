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

#ifndef COTRANSPORT_FOLLOWER_TRAJECTORY_H_
#define COTRANSPORT_FOLLOWER_TRAJECTORY_H_

#include <cstddef>
#include <span>

#include "cotransport/geometry.h"
#include "cotransport/trajectory_buffer.h"

namespace cotransport {

/// The buffered leader path is shorter than the requested offset.
class StaleBuffer : public Error {
 public:
  using Error::Error;
};

/// Desired follower placement relative to the leader's path: `s` is the
/// arc-length displacement along the path (<= 0, behind the leader) and
/// `q` the lateral offset, positive to the left of the path tangent.
struct CurvilinearOffset {
  double s = 0.0;
  double q = 0.0;

  /// Euclidean norm of (s, q), the stand-in for the desired distance.
  double norm() const;
};

/// Point on the leader path `|s|` behind the newest sample.
struct ReferencePoint {
  Pose2D pose;         // leader frame, heading along the path tangent
  double t_a = 0.0;    // when the leader passed this point
  double v = 0.0;      // leader command in effect at t_a
  double omega = 0.0;
};

struct ReferenceTarget {
  Pose2D desired_pose_local;  // follower frame
  double v_r = 0.0;
  double omega_r = 0.0;
  double t_a = 0.0;
};

/// Walks the buffer backward from the newest sample, accumulating path
/// length until |offset.s| is covered, and interpolates the pose there.
/// Throws StaleBuffer when the buffer is too short and Error for s > 0.
ReferencePoint locate_reference_point(const TrajectoryBuffer& buf,
                                      const CurvilinearOffset& offset);

/// Desired follower pose expressed in the follower frame. `measurement` is
/// the leader's pose seen from the follower and `leader_now` the leader's
/// current pose in the leader frame.
Pose2D desired_pose(const ReferencePoint& ref, const CurvilinearOffset& offset,
                    const RelativePoseMeasurement& measurement,
                    const Pose2D& leader_now);

/// Follower feed-forward velocities for a lane at lateral offset q.
VelocityCmd reference_velocities(double v_leader, double omega_leader,
                                 double q);

/// Appends one sample advanced from the newest under its own command.
void extrapolate_in_place(TrajectoryBuffer& buf, double dt);

/// Value-returning form of extrapolate_in_place.
TrajectoryBuffer extrapolate_buffer(const TrajectoryBuffer& buf, double dt);

/// Whole generation step for one follower.
ReferenceTarget generate_reference(const TrajectoryBuffer& buf,
                                   const CurvilinearOffset& offset,
                                   const RelativePoseMeasurement& measurement);

/// Buffer length that covers the largest |s| when the leader moves no
/// slower than `min_speed`, with 25% headroom.
std::size_t default_buffer_capacity(std::span<const CurvilinearOffset> offsets,
                                    double min_speed, double dt);

/// Fills `buf` with a straight history behind `start`, as if the leader had
/// approached along its initial heading at `speed`. Samples end one step
/// before t = 0.
void seed_straight_history(TrajectoryBuffer& buf, const Pose2D& start,
                           double speed, double dt, double length);

}  // namespace cotransport

#endif  // COTRANSPORT_FOLLOWER_TRAJECTORY_H_
