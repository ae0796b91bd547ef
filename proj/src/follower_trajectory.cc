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

#include "cotransport/follower_trajectory.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cotransport/world.h"

namespace cotransport {

bool operator==(const LeaderSample& a, const LeaderSample& b) {
  return a.pose.position == b.pose.position && a.pose.heading == b.pose.heading &&
         a.v == b.v && a.omega == b.omega && a.t == b.t;
}

TrajectoryBuffer::TrajectoryBuffer(std::size_t capacity)
    : capacity_(std::max<std::size_t>(capacity, 1)) {}

void TrajectoryBuffer::push(const LeaderSample& s) {
  if (!samples_.empty() && !(s.t > samples_.back().t)) {
    throw Error("TrajectoryBuffer: timestamps must strictly increase");
  }
  if (samples_.size() == capacity_) samples_.pop_front();
  samples_.push_back(s);
}

double TrajectoryBuffer::arc_length() const {
  double total = 0.0;
  for (std::size_t k = 1; k < samples_.size(); ++k) {
    total += (samples_[k].pose.position - samples_[k - 1].pose.position).norm();
  }
  return total;
}

double CurvilinearOffset::norm() const { return std::hypot(s, q); }

ReferencePoint locate_reference_point(const TrajectoryBuffer& buf,
                                      const CurvilinearOffset& offset) {
  if (buf.empty()) throw StaleBuffer("locate_reference_point: empty buffer");
  if (offset.s > 0.0) {
    throw Error("locate_reference_point: offsets ahead of the leader (s > 0) "
                "are not supported");
  }
  const double target = -offset.s;
  std::size_t k = buf.size() - 1;
  const LeaderSample& newest = buf[k];
  ReferencePoint ref{newest.pose, newest.t, newest.v, newest.omega};
  if (target == 0.0) return ref;

  double covered = 0.0;
  while (k > 0) {
    const LeaderSample& later = buf[k];
    const LeaderSample& earlier = buf[k - 1];
    const double seg = (later.pose.position - earlier.pose.position).norm();
    if (seg > 0.0 && covered + seg >= target) {
      // Fraction of the way from `earlier` to `later`.
      const double u = 1.0 - (target - covered) / seg;
      const double dh = wrap_angle(later.pose.heading - earlier.pose.heading);
      ref.pose = Pose2D(earlier.pose.position +
                            u * (later.pose.position - earlier.pose.position),
                        earlier.pose.heading + u * dh);
      ref.t_a = earlier.t + u * (later.t - earlier.t);
      ref.v = earlier.v;
      ref.omega = earlier.omega;
      return ref;
    }
    covered += seg;
    --k;
  }
  // Accumulated segment lengths can round just short of an exact fit.
  if (covered >= target - 1e-9 * std::max(1.0, target)) {
    const LeaderSample& oldest = buf.oldest();
    return ReferencePoint{oldest.pose, oldest.t, oldest.v, oldest.omega};
  }
  std::ostringstream msg;
  msg << "trajectory buffer covers " << covered << " m, offset needs " << target
      << " m";
  throw StaleBuffer(msg.str());
}

Pose2D desired_pose(const ReferencePoint& ref, const CurvilinearOffset& offset,
                    const RelativePoseMeasurement& measurement,
                    const Pose2D& leader_now) {
  const Pose2D target_leader_frame(from_frame(ref.pose, Vector2(0.0, offset.q)),
                                   ref.pose.heading);
  const Pose2D leader_seen(measurement.relative_position,
                           measurement.relative_heading);
  return compose(leader_seen, relative_pose(leader_now, target_leader_frame));
}

VelocityCmd reference_velocities(double v_leader, double omega_leader,
                                 double q) {
  return VelocityCmd{v_leader - omega_leader * q, omega_leader};
}

void extrapolate_in_place(TrajectoryBuffer& buf, double dt) {
  if (buf.empty()) throw Error("extrapolate_buffer: empty buffer");
  const LeaderSample& last = buf.newest();
  LeaderSample next;
  next.pose = integrate_pose(last.pose, last.v, last.omega, dt);
  next.v = last.v;
  next.omega = last.omega;
  next.t = last.t + dt;
  buf.push(next);
}

TrajectoryBuffer extrapolate_buffer(const TrajectoryBuffer& buf, double dt) {
  TrajectoryBuffer out = buf;
  extrapolate_in_place(out, dt);
  return out;
}

ReferenceTarget generate_reference(const TrajectoryBuffer& buf,
                                   const CurvilinearOffset& offset,
                                   const RelativePoseMeasurement& measurement) {
  const ReferencePoint ref = locate_reference_point(buf, offset);
  ReferenceTarget out;
  out.desired_pose_local = desired_pose(ref, offset, measurement, buf.newest().pose);
  const VelocityCmd vr = reference_velocities(ref.v, ref.omega, offset.q);
  out.v_r = vr.v;
  out.omega_r = vr.omega;
  out.t_a = ref.t_a;
  return out;
}

std::size_t default_buffer_capacity(std::span<const CurvilinearOffset> offsets,
                                    double min_speed, double dt) {
  double reach = 0.0;
  for (const auto& o : offsets) reach = std::max(reach, std::abs(o.s));
  if (!(min_speed > 0.0 && dt > 0.0)) {
    throw Error("default_buffer_capacity: speed and dt must be positive");
  }
  const double steps = std::ceil(reach / (min_speed * dt));
  return static_cast<std::size_t>(std::ceil(steps * 1.25)) + 2;
}

void seed_straight_history(TrajectoryBuffer& buf, const Pose2D& start,
                           double speed, double dt, double length) {
  const long count = static_cast<long>(std::ceil(length / (speed * dt)));
  const Vector2 dir(std::cos(start.heading), std::sin(start.heading));
  for (long m = count; m >= 1; --m) {
    LeaderSample s;
    s.pose = Pose2D(start.position - (static_cast<double>(m) * speed * dt) * dir,
                    start.heading);
    s.v = speed;
    s.omega = 0.0;
    s.t = -static_cast<double>(m) * dt;
    buf.push(s);
  }
}

}  // namespace cotransport
