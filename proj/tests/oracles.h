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

// Brute-force reference computations shared by the tests. Nothing here calls
// into the library's evaluation code; specs are read as plain data.
#ifndef COTRANSPORT_TESTS_ORACLES_H_
#define COTRANSPORT_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "cotransport/constraints.h"

namespace cotransport::oracle {

struct Config {
  RobotContext ctx;
  ConstraintSet set;
};

inline double point_segment(const Vector2& p, const Vector2& a, const Vector2& b) {
  const Vector2 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (a + t * ab - p).norm();
}

// Every candidate distance a selector takes the minimum over.
inline std::vector<double> candidates(const Vector2& own, const ConstraintSpec& s,
                                      const RobotContext& ctx) {
  std::vector<double> out;
  switch (s.selector.type) {
    case SelectorType::kPairwiseDistance:
      out.push_back((ctx.neighbors[s.selector.neighbors[0]] - own).norm());
      break;
    case SelectorType::kObstacleDistance:
      for (const auto& p : ctx.obstacle_points) out.push_back((p - own).norm());
      break;
    case SelectorType::kLinkDistance:
      for (const auto& p : ctx.obstacle_points) {
        for (auto j : s.selector.neighbors) {
          out.push_back(point_segment(p, own, ctx.neighbors[j]));
        }
      }
      break;
    case SelectorType::kCustom:
      out.push_back(s.selector.custom(own).value);
      break;
  }
  return out;
}

inline double measured(const Vector2& own, const ConstraintSpec& s,
                       const RobotContext& ctx) {
  const auto c = candidates(own, s, ctx);
  const double r = c.empty() ? kInf : *std::min_element(c.begin(), c.end());
  return s.transform.linear * r + s.transform.quadratic * r * r;
}

inline double ramp(double u, double gamma) {
  if (u < 0.0) return 1.0;
  if (u >= gamma) return 0.0;
  return (u - gamma) * (u - gamma) / (u + gamma * gamma);
}

inline double q_of(const ConstraintSpec& s, double g) {
  if (!std::isfinite(g)) return 0.0;
  switch (s.kind) {
    case ConstraintKind::kLowerBounded:
      return ramp(g - s.lower, s.margin);
    case ConstraintKind::kUpperBounded:
      return ramp(s.upper - g, s.margin);
    case ConstraintKind::kTwoSided:
      return std::max(ramp(g - s.lower, s.margin), ramp(s.upper - g, s.margin));
  }
  return 0.0;
}

/// (psi, beta) at `own` with everything else in `c` held fixed.
inline std::pair<double, double> psi_beta(const Vector2& own, const Config& c) {
  double keep = 1.0, beta = 0.0;
  for (const auto& s : c.set.specs()) {
    const double q = q_of(s, measured(own, s, c.ctx));
    keep *= 1.0 - q;
    beta = std::max(beta, q);
  }
  return {1.0 - keep, beta};
}

/// True when some min-over-candidates selector has its two smallest
/// candidates within `gap` of each other.
inline bool near_kink(const Vector2& own, const Config& c, double gap) {
  for (const auto& s : c.set.specs()) {
    auto v = candidates(own, s, c.ctx);
    if (v.size() < 2) continue;
    std::partial_sort(v.begin(), v.begin() + 2, v.end());
    if (v[1] - v[0] < gap) return true;
  }
  return false;
}

inline bool link_active(const Vector2& own, const Config& c) {
  for (const auto& s : c.set.specs()) {
    if (s.selector.type == SelectorType::kLinkDistance &&
        q_of(s, measured(own, s, c.ctx)) > 0.0) {
      return true;
    }
  }
  return false;
}

/// Random follower surroundings: three neighbors, a handful of scan points
/// and a mix of every selector and bound kind, tuned so that most
/// constraints sit on their ramps. With `smooth`, the scan has one point and
/// the link one partner, so psi has no argmin switches.
inline Config random_config(std::mt19937_64& rng, bool smooth = false) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uni = [&](double a, double b) { return a + (b - a) * unit(rng); };
  Config c;
  c.ctx.own_position = Vector2(uni(-0.2, 0.2), uni(-0.2, 0.2));
  for (int j = 0; j < 3; ++j) {
    const double a = uni(-kPi, kPi), r = uni(0.6, 1.8);
    c.ctx.neighbors.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  const int n_points = smooth ? 1 : 1 + static_cast<int>(unit(rng) * 12);
  for (int k = 0; k < n_points; ++k) {
    const double a = uni(-kPi, kPi), r = uni(0.6, 2.2);
    c.ctx.obstacle_points.emplace_back(r * std::cos(a), r * std::sin(a));
  }

  ConstraintSpec obstacle;
  obstacle.kind = ConstraintKind::kLowerBounded;
  obstacle.lower = 0.5;
  obstacle.margin = uni(0.3, 1.0);
  obstacle.selector = MeasurementSelector::obstacle();
  c.set.add(obstacle);

  ConstraintSpec link;
  link.kind = ConstraintKind::kLowerBounded;
  link.lower = 0.2;
  link.margin = uni(0.3, 1.0);
  link.selector = smooth ? MeasurementSelector::link({0})
                         : MeasurementSelector::link({0, 1});
  c.set.add(link);

  for (std::size_t j = 0; j < 3; ++j) {
    ConstraintSpec pair;
    pair.kind = ConstraintKind::kTwoSided;
    pair.lower = 0.4;
    pair.upper = uni(1.9, 2.5);
    pair.margin = uni(0.2, 0.6);
    pair.selector = MeasurementSelector::pairwise(j);
    c.set.add(pair);
  }

  ConstraintSpec squared;
  squared.kind = ConstraintKind::kUpperBounded;
  squared.upper = 6.0;
  squared.margin = 4.0;
  squared.transform = {0.5, 1.0};
  squared.selector = MeasurementSelector::pairwise(2);
  c.set.add(squared);

  const double heading = uni(-kPi, kPi);
  const Vector2 dir(std::cos(heading), std::sin(heading));
  ConstraintSpec custom;
  custom.kind = ConstraintKind::kLowerBounded;
  custom.lower = -1.0;
  custom.margin = 1.5;
  custom.selector = MeasurementSelector::custom_fn([dir](const Vector2& p) {
    return CustomMeasurement{dir.dot(p), dir};
  });
  c.set.add(custom);
  return c;
}

}  // namespace cotransport::oracle

#endif  // COTRANSPORT_TESTS_ORACLES_H_
