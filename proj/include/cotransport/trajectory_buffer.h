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

#ifndef COTRANSPORT_TRAJECTORY_BUFFER_H_
#define COTRANSPORT_TRAJECTORY_BUFFER_H_

#include <cstddef>
#include <deque>

#include "cotransport/geometry.h"

namespace cotransport {

/// One recorded leader state, in the leader's reference frame (the leader's
/// initial pose). `v` and `omega` are the command applied from `t` onward.
struct LeaderSample {
  Pose2D pose;
  double v = 0.0;
  double omega = 0.0;
  double t = 0.0;
};

bool operator==(const LeaderSample& a, const LeaderSample& b);

/// Rolling window of the most recent `capacity` leader samples, oldest
/// first.
class TrajectoryBuffer {
 public:
  explicit TrajectoryBuffer(std::size_t capacity = 1);

  /// Appends a sample, dropping the oldest one when full. Throws Error if
  /// `s.t` does not strictly follow the newest timestamp.
  void push(const LeaderSample& s);

  std::size_t size() const { return samples_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return samples_.empty(); }

  const LeaderSample& operator[](std::size_t i) const { return samples_[i]; }
  const LeaderSample& newest() const { return samples_.back(); }
  const LeaderSample& oldest() const { return samples_.front(); }

  /// Total path length covered by the buffered positions.
  double arc_length() const;

  friend bool operator==(const TrajectoryBuffer&,
                         const TrajectoryBuffer&) = default;

 private:
  std::size_t capacity_;
  std::deque<LeaderSample> samples_;
};

}  // namespace cotransport

#endif  // COTRANSPORT_TRAJECTORY_BUFFER_H_
