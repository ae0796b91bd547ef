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

#include "cotransport/constraints.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace cotransport {

namespace {

// Ramp shared by all three barrier kinds. `u` is the distance from the bound
// into the admissible side; returns q and dq/du.
std::pair<double, double> ramp(double u, double margin) {
  const double num = u - margin;
  const double den = u + margin * margin;
  const double q = num * num / den;
  const double dq_du = num * (u + 2.0 * margin * margin + margin) / (den * den);
  return {q, dq_du};
}

BarrierValue saturated_value() { return BarrierValue{1.0, 0.0, true}; }

}  // namespace

BarrierValue barrier_lower(double g, double bound, double margin) {
  const double u = g - bound;
  if (u < 0.0) return saturated_value();
  if (u >= margin) return {};
  const auto [q, dq] = ramp(u, margin);
  return BarrierValue{q, dq, false};
}

BarrierValue barrier_upper(double g, double bound, double margin) {
  const double u = bound - g;
  if (u < 0.0) return saturated_value();
  if (u >= margin) return {};
  const auto [q, dq] = ramp(u, margin);
  return BarrierValue{q, -dq, false};
}

BarrierValue barrier_two_sided(double g, double lower, double upper,
                               double margin) {
  if (g < lower || g > upper) return saturated_value();
  if (g <= lower + margin) return barrier_lower(g, lower, margin);
  if (g > upper - margin) return barrier_upper(g, upper, margin);
  return {};
}

double q_lower(double g, double bound, double margin) {
  return barrier_lower(g, bound, margin).q;
}

double q_upper(double g, double bound, double margin) {
  return barrier_upper(g, bound, margin).q;
}

double q_two_sided(double g, double lower, double upper, double margin) {
  if (!(margin > 0.0) || !(margin < 0.5 * (upper - lower))) {
    throw ConstraintConfigError(
        "two-sided barrier needs 0 < margin < (upper - lower) / 2");
  }
  return barrier_two_sided(g, lower, upper, margin).q;
}

MeasurementSelector MeasurementSelector::pairwise(std::size_t neighbor) {
  MeasurementSelector s;
  s.type = SelectorType::kPairwiseDistance;
  s.neighbors = {neighbor};
  return s;
}

MeasurementSelector MeasurementSelector::obstacle() {
  MeasurementSelector s;
  s.type = SelectorType::kObstacleDistance;
  return s;
}

MeasurementSelector MeasurementSelector::link(std::vector<std::size_t> partners) {
  MeasurementSelector s;
  s.type = SelectorType::kLinkDistance;
  s.neighbors = std::move(partners);
  return s;
}

MeasurementSelector MeasurementSelector::custom_fn(CustomFunction fn) {
  MeasurementSelector s;
  s.type = SelectorType::kCustom;
  s.custom = std::move(fn);
  return s;
}

double MixedSpec::f_bound(double v_bar, double omega_bar) const {
  return std::abs(v_sq) * v_bar * v_bar + std::abs(abs_omega) * omega_bar;
}

double MixedSpec::raw_value(double v, double omega, double r) const {
  return v_sq * v * v + abs_omega * std::abs(omega) +
         abs_omega_dist * std::abs(omega) * r + dist * r + dist_sq * r * r;
}

void ConstraintSpec::validate() const {
  auto fail = [this](const std::string& why) {
    throw ConstraintConfigError("constraint '" + label + "': " + why);
  };
  if (!(margin > 0.0) || !std::isfinite(margin)) fail("margin must be positive");
  switch (kind) {
    case ConstraintKind::kTwoSided:
      if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
        fail("two-sided bounds must be finite with lower < upper");
      }
      if (!(margin < 0.5 * (upper - lower))) {
        fail("margin must be smaller than half the band width");
      }
      break;
    case ConstraintKind::kLowerBounded:
      if (!std::isfinite(lower)) fail("lower bound must be finite");
      break;
    case ConstraintKind::kUpperBounded:
      if (!std::isfinite(upper)) fail("upper bound must be finite");
      break;
  }
  switch (selector.type) {
    case SelectorType::kPairwiseDistance:
      if (selector.neighbors.size() != 1) fail("pairwise selector needs one neighbor");
      break;
    case SelectorType::kLinkDistance:
      if (selector.neighbors.empty()) fail("link selector needs partners");
      break;
    case SelectorType::kCustom:
      if (!selector.custom) fail("custom selector needs a function");
      break;
    case SelectorType::kObstacleDistance:
      break;
  }
}

ConstraintSpec decouple_mixed(double f_bound, double lower, double upper) {
  if (!(f_bound >= 0.0)) {
    throw InfeasibleMixedConstraint("velocity bound of a mixed constraint must be >= 0");
  }
  if (!(lower < upper)) {
    throw InfeasibleMixedConstraint("mixed constraint needs lower < upper");
  }
  if (f_bound > 0.5 * (upper - lower)) {
    std::ostringstream msg;
    msg << "velocity part bound " << f_bound << " exceeds half the band ("
        << 0.5 * (upper - lower) << "); lower the velocity caps v_bar/w_bar";
    throw InfeasibleMixedConstraint(msg.str());
  }
  ConstraintSpec spec;
  spec.lower = lower + f_bound;
  spec.upper = upper - f_bound;
  const bool has_lower = std::isfinite(lower);
  const bool has_upper = std::isfinite(upper);
  if (has_lower && has_upper) {
    spec.kind = ConstraintKind::kTwoSided;
  } else if (has_lower) {
    spec.kind = ConstraintKind::kLowerBounded;
  } else if (has_upper) {
    spec.kind = ConstraintKind::kUpperBounded;
  } else {
    throw InfeasibleMixedConstraint("mixed constraint has no finite bound");
  }
  return spec;
}

ConstraintSpec make_mixed_constraint(const MixedSpec& m, std::size_t neighbor,
                                     double v_bar, double omega_bar,
                                     double margin, std::string label) {
  if (m.abs_omega_dist != 0.0 && (m.abs_omega_dist < 0.0 || std::isfinite(m.lower))) {
    throw ConstraintConfigError(
        "mixed constraint '" + label +
        "': an |w|*r term is only supported with a non-negative coefficient "
        "and no lower bound");
  }
  ConstraintSpec spec = decouple_mixed(m.f_bound(v_bar, omega_bar), m.lower, m.upper);
  spec.margin = margin;
  spec.selector = MeasurementSelector::pairwise(neighbor);
  spec.transform.linear = m.dist + m.abs_omega_dist * omega_bar;
  spec.transform.quadratic = m.dist_sq;
  spec.mixed = m;
  spec.label = std::move(label);
  spec.validate();
  return spec;
}

ConstraintSpec make_equality(double target, double margin,
                             MeasurementSelector selector) {
  ConstraintSpec spec;
  spec.kind = ConstraintKind::kTwoSided;
  spec.lower = target - 5.0 * margin;
  spec.upper = target + 5.0 * margin;
  spec.margin = margin;
  spec.selector = std::move(selector);
  spec.label = "equality";
  spec.validate();
  return spec;
}

ConstraintSet::ConstraintSet(std::vector<ConstraintSpec> specs) {
  for (auto& s : specs) add(std::move(s));
}

void ConstraintSet::add(ConstraintSpec spec) {
  spec.validate();
  specs_.push_back(std::move(spec));
}

// ---------------------------------------------------------------------------

CustomMeasurement obstacle_distance(const Vector2& own,
                                    const std::vector<Vector2>& points) {
  CustomMeasurement m{kInf, Vector2::Zero()};
  double best2 = kInf;
  const Vector2* nearest = nullptr;
  for (const auto& p : points) {
    const double d2 = (p - own).squaredNorm();
    if (d2 < best2) {
      best2 = d2;
      nearest = &p;
    }
  }
  if (nearest == nullptr) return m;
  m.value = std::sqrt(best2);
  if (m.value > 0.0) m.gradient = -(*nearest - own) / m.value;
  return m;
}

namespace {

// Link clearance for one (point, partner) pair with its gradient w.r.t. own.
CustomMeasurement link_term(const Vector2& own, const Vector2& partner,
                            const Vector2& p_o) {
  const Vector2 d = partner - own;
  const double len = d.norm();
  CustomMeasurement m;
  if (!(len > 0.0)) {
    m.value = (p_o - own).norm();
    if (m.value > 0.0) m.gradient = -(p_o - own) / m.value;
    return m;
  }
  if ((p_o - own).dot(d) > 0.0 && (p_o - partner).dot(d) < 0.0) {
    const double signed_dist = cross(d, p_o - own) / len;
    const Vector2 grad_signed =
        (len * perp(p_o - partner) + signed_dist * d) / (len * len);
    m.value = std::abs(signed_dist);
    m.gradient = signed_dist >= 0.0 ? grad_signed : Vector2(-grad_signed);
    return m;
  }
  const double to_own = (p_o - own).norm();
  const double to_partner = (p_o - partner).norm();
  if (to_own <= to_partner) {
    m.value = to_own;
    if (to_own > 0.0) m.gradient = -(p_o - own) / to_own;
  } else {
    m.value = to_partner;  // the partner's endpoint does not move with us
  }
  return m;
}

template <typename PartnerAt>
CustomMeasurement link_distance_impl(const Vector2& own, std::size_t n_partners,
                                     PartnerAt partner_at,
                                     const std::vector<Vector2>& points) {
  CustomMeasurement best{kInf, Vector2::Zero()};
  for (const auto& p_o : points) {
    for (std::size_t j = 0; j < n_partners; ++j) {
      const CustomMeasurement m = link_term(own, partner_at(j), p_o);
      if (m.value < best.value) best = m;
    }
  }
  return best;
}

CustomMeasurement measure(const ConstraintSpec& spec, const RobotContext& ctx) {
  const auto& sel = spec.selector;
  auto neighbor = [&ctx](std::size_t idx) -> const Vector2& {
    if (idx >= ctx.neighbors.size()) {
      throw ConstraintConfigError("constraint selector names a missing neighbor");
    }
    return ctx.neighbors[idx];
  };
  switch (sel.type) {
    case SelectorType::kPairwiseDistance: {
      const Vector2 d = neighbor(sel.neighbors[0]) - ctx.own_position;
      const double r = d.norm();
      CustomMeasurement m{r, Vector2::Zero()};
      if (r > 0.0) m.gradient = -d / r;
      return m;
    }
    case SelectorType::kObstacleDistance:
      return obstacle_distance(ctx.own_position, ctx.obstacle_points);
    case SelectorType::kLinkDistance:
      return link_distance_impl(
          ctx.own_position, sel.neighbors.size(),
          [&](std::size_t j) -> const Vector2& { return neighbor(sel.neighbors[j]); },
          ctx.obstacle_points);
    case SelectorType::kCustom:
      return sel.custom(ctx.own_position);
  }
  return {};
}

BarrierValue barrier_for(const ConstraintSpec& spec, double g) {
  switch (spec.kind) {
    case ConstraintKind::kTwoSided:
      return barrier_two_sided(g, spec.lower, spec.upper, spec.margin);
    case ConstraintKind::kLowerBounded:
      return barrier_lower(g, spec.lower, spec.margin);
    case ConstraintKind::kUpperBounded:
      return barrier_upper(g, spec.upper, spec.margin);
  }
  return {};
}

// Side of the band the value is pressing against: -1 lower, +1 upper.
double pressing_side(const ConstraintSpec& spec, double g) {
  switch (spec.kind) {
    case ConstraintKind::kLowerBounded:
      return -1.0;
    case ConstraintKind::kUpperBounded:
      return 1.0;
    case ConstraintKind::kTwoSided:
      return (g - spec.lower) <= (spec.upper - g) ? -1.0 : 1.0;
  }
  return 1.0;
}

thread_local std::vector<Vector2> tl_grad_q;
thread_local std::vector<double> tl_prefix;

}  // namespace

CustomMeasurement link_distance(const Vector2& own,
                                const std::vector<Vector2>& partners,
                                const std::vector<Vector2>& points) {
  return link_distance_impl(
      own, partners.size(),
      [&](std::size_t j) -> const Vector2& { return partners[j]; }, points);
}

void evaluate_into(const RobotContext& ctx, const ConstraintSet& set,
                   const EvaluationOptions& opts, ConstraintEvaluation& out) {
  const std::size_t n = set.size();
  out.g.resize(n);
  out.q.resize(n);
  out.beta = 0.0;
  out.psi = 0.0;
  out.tau.setZero();
  out.saturated = false;
  out.rho_obstacle = kInf;
  out.rho_link = kInf;

  auto& grad_q = tl_grad_q;
  auto& prefix = tl_prefix;
  grad_q.resize(n);
  prefix.resize(n + 1);

  Vector2 saturated_dir = Vector2::Zero();
  bool obstacle_seen = false;
  prefix[0] = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const ConstraintSpec& spec = set[k];
    const CustomMeasurement m = measure(spec, ctx);
    if (spec.selector.type == SelectorType::kObstacleDistance) {
      out.rho_obstacle = m.value;
      obstacle_seen = true;
    } else if (spec.selector.type == SelectorType::kLinkDistance) {
      out.rho_link = std::min(out.rho_link, m.value);
    }
    if (!std::isfinite(m.value)) {
      // Nothing sensed for this selector: the constraint is inactive.
      out.g[k] = m.value;
      out.q[k] = 0.0;
      grad_q[k].setZero();
      prefix[k + 1] = prefix[k];
      continue;
    }
    const auto& tr = spec.transform;
    const double g = tr.linear * m.value + tr.quadratic * m.value * m.value;
    const Vector2 grad_g = (tr.linear + 2.0 * tr.quadratic * m.value) * m.gradient;
    const BarrierValue b = barrier_for(spec, g);
    out.g[k] = g;
    out.q[k] = b.q;
    grad_q[k] = b.slope * grad_g;
    out.beta = std::max(out.beta, b.q);
    prefix[k + 1] = prefix[k] * (1.0 - b.q);
    if (b.q >= 1.0) {
      out.saturated = true;
      const double norm = grad_g.norm();
      if (norm > 0.0) saturated_dir += pressing_side(spec, g) * grad_g / norm;
    }
  }
  if (!obstacle_seen) {
    out.rho_obstacle = obstacle_distance(ctx.own_position, ctx.obstacle_points).value;
  }
  out.psi = 1.0 - prefix[n];

  if (out.saturated) {
    const double norm = saturated_dir.norm();
    if (norm > 0.0) out.tau = opts.saturated_gradient_norm * saturated_dir / norm;
    return;
  }
  // d psi = sum_k dq_k * prod_{m != k} (1 - q_m), via prefix/suffix products.
  double suffix = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    out.tau += grad_q[k] * (prefix[k] * suffix);
    suffix *= 1.0 - out.q[k];
  }
}

ConstraintEvaluation evaluate(const RobotContext& ctx, const ConstraintSet& set,
                              const EvaluationOptions& opts) {
  ConstraintEvaluation out;
  evaluate_into(ctx, set, opts, out);
  return out;
}

Vector2 grad_tau(const RobotContext& ctx, const ConstraintSet& set,
                 const EvaluationOptions& opts) {
  return evaluate(ctx, set, opts).tau;
}

double psi_at(const RobotContext& ctx, const ConstraintSet& set) {
  return evaluate(ctx, set).psi;
}

}  // namespace cotransport
