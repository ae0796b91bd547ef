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

#ifndef COTRANSPORT_CONSTRAINTS_H_
#define COTRANSPORT_CONSTRAINTS_H_

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cotransport/geometry.h"

namespace cotransport {

/// Malformed constraint declaration.
class ConstraintConfigError : public Error {
 public:
  using Error::Error;
};

/// A mixed velocity/position constraint whose velocity part is too large to
/// be absorbed by the position bounds.
class InfeasibleMixedConstraint : public Error {
 public:
  using Error::Error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Barrier-like functions. Each maps the constrained quantity g to [0, 1]: 0
// on the safe plateau, a rational ramp across the margin and exactly 1 at the
// bound. Outside the admissible set they clamp to 1.
// ---------------------------------------------------------------------------

/// Value and slope dQ/dg of a barrier function at one point.
struct BarrierValue {
  double q = 0.0;
  double slope = 0.0;
  bool outside = false;  // g outside the admissible set, q clamped to 1
};

BarrierValue barrier_lower(double g, double bound, double margin);
BarrierValue barrier_upper(double g, double bound, double margin);
BarrierValue barrier_two_sided(double g, double lower, double upper,
                               double margin);

double q_lower(double g, double bound, double margin);
double q_upper(double g, double bound, double margin);
double q_two_sided(double g, double lower, double upper, double margin);

// ---------------------------------------------------------------------------
// Declarations.
// ---------------------------------------------------------------------------

enum class ConstraintKind { kTwoSided, kLowerBounded, kUpperBounded };

enum class SelectorType {
  kPairwiseDistance,  // ||p_j - p_i|| for one neighbor
  kObstacleDistance,  // nearest scan point
  kLinkDistance,      // nearest scan point to the links toward partners
  kCustom,
};

/// Value and gradient (w.r.t. the robot's own position) of a custom g.
struct CustomMeasurement {
  double value = 0.0;
  Vector2 gradient = Vector2::Zero();
};

using CustomFunction = std::function<CustomMeasurement(const Vector2& own)>;

/// Which geometric quantity a constraint acts on. Neighbor indices refer to
/// RobotContext::neighbors.
struct MeasurementSelector {
  SelectorType type = SelectorType::kPairwiseDistance;
  std::vector<std::size_t> neighbors;
  CustomFunction custom;

  static MeasurementSelector pairwise(std::size_t neighbor);
  static MeasurementSelector obstacle();
  static MeasurementSelector link(std::vector<std::size_t> partners);
  static MeasurementSelector custom_fn(CustomFunction fn);
};

/// g = linear * r + quadratic * r^2 applied to the selected measurement r.
struct MeasurementTransform {
  double linear = 1.0;
  double quadratic = 0.0;
};

/// Velocity/position inequality
///   lower <= v_sq*v^2 + abs_omega*|w| + abs_omega_dist*|w|*r
///            + dist*r + dist_sq*r^2 <= upper
/// on a pairwise distance r. Only the velocity terms are bounded through
/// the actuator caps; the |w|*r term is folded into the position part with
/// |w| <= w_bar, which is conservative for an upper bound only.
struct MixedSpec {
  double v_sq = 0.0;
  double abs_omega = 0.0;
  double abs_omega_dist = 0.0;
  double dist = 0.0;
  double dist_sq = 0.0;
  double lower = -kInf;
  double upper = kInf;

  /// Bound on the velocity-only part inferred from |v| <= v_bar and
  /// |w| <= w_bar.
  double f_bound(double v_bar, double omega_bar) const;

  /// Raw left-hand side with actual velocities.
  double raw_value(double v, double omega, double r) const;
};

struct ConstraintSpec {
  ConstraintKind kind = ConstraintKind::kLowerBounded;
  double lower = -kInf;
  double upper = kInf;
  double margin = 0.0;
  MeasurementSelector selector;
  MeasurementTransform transform;
  std::optional<MixedSpec> mixed;  // set when derived from a mixed constraint
  std::string label;

  /// Throws ConstraintConfigError on inconsistent bounds or margin.
  void validate() const;
};

/// Two-sided spec on the position part after absorbing the velocity bound:
/// lower + f_bound <= g <= upper - f_bound. Infinite sides stay infinite, so
/// a one-sided mixed constraint decouples into a one-sided spec.
/// Throws InfeasibleMixedConstraint when f_bound > (upper - lower) / 2.
ConstraintSpec decouple_mixed(double f_bound, double lower, double upper);

/// Builds the decoupled spec for `m` on the distance to `neighbor`.
ConstraintSpec make_mixed_constraint(const MixedSpec& m, std::size_t neighbor,
                                     double v_bar, double omega_bar,
                                     double margin, std::string label = {});

/// Equality g == target, approximated by a narrow two-sided band of width
/// 10 * margin.
ConstraintSpec make_equality(double target, double margin,
                             MeasurementSelector selector);

/// Immutable collection of one robot's constraints.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  explicit ConstraintSet(std::vector<ConstraintSpec> specs);

  void add(ConstraintSpec spec);
  std::size_t size() const { return specs_.size(); }
  const ConstraintSpec& operator[](std::size_t i) const { return specs_[i]; }
  const std::vector<ConstraintSpec>& specs() const { return specs_; }

 private:
  std::vector<ConstraintSpec> specs_;
};

// ---------------------------------------------------------------------------
// Evaluation.
// ---------------------------------------------------------------------------

/// Everything a follower knows about its surroundings, in one frame
/// (normally its own, with own_position at the origin).
struct RobotContext {
  Vector2 own_position = Vector2::Zero();
  std::vector<Vector2> neighbors;
  std::vector<Vector2> obstacle_points;
};

struct ConstraintEvaluation {
  std::vector<double> g;  // constrained quantity per spec
  std::vector<double> q;  // barrier value per spec
  double beta = 0.0;      // max q
  double psi = 0.0;       // 1 - prod(1 - q)
  Vector2 tau = Vector2::Zero();  // gradient of psi w.r.t. own position
  bool saturated = false;         // some q reached 1; tau is the fallback
  double rho_obstacle = kInf;     // nearest scan point distance
  double rho_link = kInf;         // nearest scan point to partner links
};

struct EvaluationOptions {
  /// Norm of tau when some constraint is at or past its bound.
  double saturated_gradient_norm = 10.0;
};

/// Distance and gradient of the nearest obstacle point. Infinite distance
/// with zero gradient when there are no points.
CustomMeasurement obstacle_distance(const Vector2& own,
                                    const std::vector<Vector2>& points);

/// Smallest link clearance between the scan points and the segments from
/// `own` to each partner, with its gradient w.r.t. `own`. The argmin pair is
/// held fixed for the gradient; ties go to the first point, then the first
/// partner.
CustomMeasurement link_distance(const Vector2& own,
                                const std::vector<Vector2>& partners,
                                const std::vector<Vector2>& points);

/// Evaluates every barrier, their aggregate and its analytic gradient.
/// Throws ConstraintConfigError when a selector names a missing neighbor.
ConstraintEvaluation evaluate(const RobotContext& ctx, const ConstraintSet& set,
                              const EvaluationOptions& opts = {});

/// Allocation-free form of evaluate for hot loops; `out` is reused.
void evaluate_into(const RobotContext& ctx, const ConstraintSet& set,
                   const EvaluationOptions& opts, ConstraintEvaluation& out);

/// Gradient of psi with respect to the robot's own position.
Vector2 grad_tau(const RobotContext& ctx, const ConstraintSet& set,
                 const EvaluationOptions& opts = {});

/// psi alone, for finite-difference and descent checks.
double psi_at(const RobotContext& ctx, const ConstraintSet& set);

}  // namespace cotransport

#endif  // COTRANSPORT_CONSTRAINTS_H_
