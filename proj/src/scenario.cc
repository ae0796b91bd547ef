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

#include "cotransport/scenario.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "cotransport/simulation.h"

namespace cotransport {

ScenarioError::ScenarioError(const std::string& what, int line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

std::vector<std::size_t> Scenario::follower_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    if (robots[i].role == Role::kFollower) out.push_back(i);
  }
  return out;
}

std::vector<CurvilinearOffset> Scenario::follower_offsets() const {
  std::vector<CurvilinearOffset> out;
  for (std::size_t i : follower_indices()) out.push_back(robots[i].offset);
  return out;
}

CurvilinearOffset Scenario::offset_of(std::size_t robot) const {
  return robots.at(robot).role == Role::kLeader ? CurvilinearOffset{}
                                                : robots[robot].offset;
}

std::size_t Scenario::index_of(const std::string& robot_name) const {
  for (std::size_t i = 0; i < robots.size(); ++i) {
    if (robots[i].name == robot_name) return i;
  }
  throw ScenarioError("unknown robot '" + robot_name + "'");
}

// ---------------------------------------------------------------------------
// YAML reading.
// ---------------------------------------------------------------------------

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

YAML::Node require(const YAML::Node& parent, const char* key) {
  const YAML::Node n = parent[key];
  if (!n) {
    throw ScenarioError(std::string("missing required key '") + key + "'",
                        line_of(parent));
  }
  return n;
}

template <typename T>
T as(const YAML::Node& n, const char* what) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ScenarioError(std::string("bad value for '") + what + "'", line_of(n));
  }
}

double read_double(const YAML::Node& n, const char* what) {
  // yaml-cpp understands .inf / -.inf.
  return as<double>(n, what);
}

template <typename T>
void read_opt(const YAML::Node& parent, const char* key, T& dst) {
  if (const YAML::Node n = parent[key]) dst = as<T>(n, key);
}

Vector2 read_vec2(const YAML::Node& n, const char* what) {
  if (!n.IsSequence() || n.size() != 2) {
    throw ScenarioError(std::string("'") + what + "' must be [x, y]", line_of(n));
  }
  return Vector2(read_double(n[0], what), read_double(n[1], what));
}

Pose2D read_pose(const YAML::Node& n) {
  if (!n.IsSequence() || n.size() != 3) {
    throw ScenarioError("'pose' must be [x, y, theta]", line_of(n));
  }
  return Pose2D(read_double(n[0], "pose"), read_double(n[1], "pose"),
                read_double(n[2], "pose"));
}

Obstacle read_obstacle(const YAML::Node& n) {
  if (const YAML::Node c = n["circle"]) {
    CircleObstacle circle{read_vec2(require(c, "center"), "center"),
                          read_double(require(c, "radius"), "radius")};
    return circle;
  }
  if (const YAML::Node p = n["polygon"]) {
    if (!p.IsSequence()) throw ScenarioError("'polygon' must be a vertex list", line_of(p));
    PolygonObstacle poly;
    for (const auto& v : p) poly.vertices.push_back(read_vec2(v, "polygon vertex"));
    return poly;
  }
  throw ScenarioError("obstacle must be 'circle' or 'polygon'", line_of(n));
}

std::vector<std::size_t> read_robot_list(const YAML::Node& n, const Scenario& s) {
  std::vector<std::size_t> out;
  if (!n || (n.IsScalar() && n.Scalar() == "all")) return out;
  if (!n.IsSequence()) {
    throw ScenarioError("robot list must be 'all' or a sequence of names", line_of(n));
  }
  for (const auto& item : n) {
    const auto name = as<std::string>(item, "robot name");
    try {
      out.push_back(s.index_of(name));
    } catch (const ScenarioError& e) {
      throw ScenarioError(e.what(), line_of(item));
    }
  }
  return out;
}

ConstraintDecl read_constraint(const YAML::Node& n, const Scenario& s) {
  ConstraintDecl d;
  d.line = line_of(n);
  const auto kind = as<std::string>(require(n, "kind"), "kind");
  if (kind == "two_sided") {
    d.type = ConstraintDecl::Type::kTwoSided;
  } else if (kind == "lower") {
    d.type = ConstraintDecl::Type::kLower;
  } else if (kind == "upper") {
    d.type = ConstraintDecl::Type::kUpper;
  } else if (kind == "mixed") {
    d.type = ConstraintDecl::Type::kMixed;
  } else {
    throw ScenarioError("unknown constraint kind '" + kind + "'", d.line);
  }
  const YAML::Node sel = require(n, "selector");
  const auto type = as<std::string>(require(sel, "type"), "selector type");
  if (type == "pairwise") {
    d.selector = SelectorType::kPairwiseDistance;
    d.neighbors = read_robot_list(sel["neighbors"], s);
  } else if (type == "obstacle") {
    d.selector = SelectorType::kObstacleDistance;
  } else if (type == "link") {
    d.selector = SelectorType::kLinkDistance;
  } else {
    throw ScenarioError("unknown selector type '" + type + "'", line_of(sel));
  }
  d.followers = read_robot_list(n["followers"], s);
  d.margin = read_double(require(n, "margin"), "margin");
  read_opt(n, "label", d.label);
  if (const YAML::Node b = n["bounds"]) {
    if (b.IsScalar() && b.Scalar() == "formation") {
      d.formation_bounds = true;
    } else {
      throw ScenarioError("'bounds' only accepts 'formation'", line_of(b));
    }
  }
  if (const YAML::Node b = n["lower"]) d.lower = read_double(b, "lower");
  if (const YAML::Node b = n["upper"]) d.upper = read_double(b, "upper");
  if (d.type == ConstraintDecl::Type::kMixed) {
    if (d.selector != SelectorType::kPairwiseDistance) {
      throw ScenarioError("mixed constraints act on pairwise distances", d.line);
    }
    const YAML::Node t = require(n, "terms");
    read_opt(t, "v_sq", d.mixed.v_sq);
    read_opt(t, "abs_omega", d.mixed.abs_omega);
    read_opt(t, "abs_omega_dist", d.mixed.abs_omega_dist);
    read_opt(t, "dist", d.mixed.dist);
    read_opt(t, "dist_sq", d.mixed.dist_sq);
    d.mixed.lower = d.lower;
    d.mixed.upper = d.upper;
  }
  if (d.formation_bounds && !(d.type == ConstraintDecl::Type::kTwoSided &&
                              d.selector == SelectorType::kPairwiseDistance)) {
    throw ScenarioError("'bounds: formation' needs a two_sided pairwise constraint",
                        d.line);
  }
  return d;
}

}  // namespace

Scenario parse_scenario(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(e.msg, e.mark.line + 1);
  }
  if (!root.IsMap()) throw ScenarioError("scenario must be a mapping", 1);

  Scenario s;
  s.format_version = as<int>(require(root, "format_version"), "format_version");
  if (s.format_version != kScenarioFormatVersion) {
    throw ScenarioError("unsupported format_version " +
                            std::to_string(s.format_version),
                        line_of(root["format_version"]));
  }
  read_opt(root, "name", s.name);

  const YAML::Node world = require(root, "world");
  s.world.goal = read_vec2(require(world, "goal"), "goal");
  if (const YAML::Node obs = world["obstacles"]) {
    for (const auto& o : obs) {
      s.world.obstacles.push_back(read_obstacle(o));
      try {
        validate_obstacle(s.world.obstacles.back());
      } catch (const GeometryError& e) {
        throw ScenarioError(e.what(), line_of(o));
      }
    }
  }

  const YAML::Node payload = require(root, "payload");
  s.payload.cable_length = read_double(require(payload, "cable_length"), "cable_length");
  s.payload.mount_height = read_double(require(payload, "mount_height"), "mount_height");
  s.payload.payload_height =
      read_double(require(payload, "payload_height"), "payload_height");
  s.payload.min_safe_height =
      read_double(require(payload, "min_safe_height"), "min_safe_height");
  s.payload.suspension_radius =
      read_double(require(payload, "suspension_radius"), "suspension_radius");
  s.payload.formation_radius =
      read_double(require(payload, "formation_radius"), "formation_radius");
  if (const YAML::Node n = payload["reported_r_plus"]) {
    s.reported_r_plus = read_double(n, "reported_r_plus");
  }
  if (const YAML::Node n = payload["reported_r_minus"]) {
    s.reported_r_minus = read_double(n, "reported_r_minus");
  }

  if (const YAML::Node f = root["formation"]) {
    read_opt(f, "collision_distance", s.collision_distance);
    read_opt(f, "camera_range", s.camera_range);
  }

  const YAML::Node robots = require(root, "robots");
  if (!robots.IsSequence() || robots.size() < 2) {
    throw ScenarioError("'robots' needs a leader and at least one follower",
                        line_of(robots));
  }
  for (const auto& r : robots) {
    RobotConfig rc;
    rc.name = as<std::string>(require(r, "name"), "name");
    const auto role = as<std::string>(require(r, "role"), "role");
    if (role == "leader") {
      rc.role = Role::kLeader;
    } else if (role == "follower") {
      rc.role = Role::kFollower;
    } else {
      throw ScenarioError("role must be 'leader' or 'follower'", line_of(r));
    }
    rc.initial_pose = read_pose(require(r, "pose"));
    read_opt(r, "camera_angle", rc.camera_angle);
    if (rc.role == Role::kFollower) {
      const YAML::Node off = require(r, "offset");
      rc.offset.s = read_double(require(off, "s"), "offset.s");
      rc.offset.q = read_double(require(off, "q"), "offset.q");
      if (rc.offset.s > 0.0) {
        throw ScenarioError("follower offsets must have s <= 0 (behind the leader)",
                            line_of(off));
      }
    }
    for (const auto& existing : s.robots) {
      if (existing.name == rc.name) {
        throw ScenarioError("duplicate robot name '" + rc.name + "'", line_of(r));
      }
    }
    s.robots.push_back(rc);
  }
  if (s.robots.front().role != Role::kLeader) {
    throw ScenarioError("the first robot must be the leader", line_of(robots[0]));
  }
  for (std::size_t i = 1; i < s.robots.size(); ++i) {
    if (s.robots[i].role == Role::kLeader) {
      throw ScenarioError("exactly one leader is supported", line_of(robots[i]));
    }
  }
  // Link partners are names, so resolve them once every robot is known.
  for (std::size_t i = 0; i < s.robots.size(); ++i) {
    if (const YAML::Node links = robots[i]["links"]) {
      s.robots[i].links = read_robot_list(links, s);
    }
  }

  if (const YAML::Node l = root["leader"]) {
    read_opt(l, "v_nominal", s.leader.v_nominal);
    read_opt(l, "omega_nominal", s.leader.omega_nominal);
    read_opt(l, "turn_distance", s.leader.turn_distance);
    read_opt(l, "safe_distance", s.leader.safe_distance);
    read_opt(l, "prediction_horizon", s.leader.prediction_horizon);
    read_opt(l, "min_obstacle_distance", s.leader_min_obstacle_distance);
  }
  if (const YAML::Node g = root["gains"]) {
    read_opt(g, "c1", s.gains.c1);
    read_opt(g, "c2", s.gains.c2);
    read_opt(g, "c3", s.gains.c3);
    read_opt(g, "k_v_preserve", s.gains.k_v_preserve);
    read_opt(g, "k_omega_preserve", s.gains.k_omega_preserve);
    read_opt(g, "beta_threshold", s.gains.beta_threshold);
    read_opt(g, "v_bar", s.gains.v_bar);
    read_opt(g, "omega_bar", s.gains.omega_bar);
  }
  if (const YAML::Node c = root["camera"]) {
    read_opt(c, "fov", s.camera.fov);
    read_opt(c, "deadband", s.camera.deadband);
    read_opt(c, "gain", s.camera.gain);
    read_opt(c, "max_rate", s.camera.max_rate);
  }
  if (const YAML::Node l = root["lidar"]) {
    read_opt(l, "beams", s.lidar.beams);
    read_opt(l, "range", s.lidar.range);
    read_opt(l, "include_robots", s.lidar.include_robots);
    read_opt(l, "robot_radius", s.lidar.robot_radius);
  }
  if (const YAML::Node n = root["noise"]) {
    read_opt(n, "lidar_range_std", s.noise.lidar_range_std);
    read_opt(n, "camera_range_std", s.noise.camera_range_std);
    read_opt(n, "camera_bearing_std", s.noise.camera_bearing_std);
  }
  if (const YAML::Node c = root["constraints"]) {
    for (const auto& item : c) s.constraints.push_back(read_constraint(item, s));
  }
  if (const YAML::Node sim = root["sim"]) {
    read_opt(sim, "dt", s.sim.dt);
    read_opt(sim, "max_steps", s.sim.max_steps);
    read_opt(sim, "seed", s.sim.seed);
    read_opt(sim, "goal_tolerance", s.sim.goal_tolerance);
    read_opt(sim, "grace_window", s.sim.grace_window);
    read_opt(sim, "min_leader_speed", s.sim.min_leader_speed);
    read_opt(sim, "buffer_capacity", s.sim.buffer_capacity);
    read_opt(sim, "saturated_gradient_norm", s.sim.saturated_gradient_norm);
    read_opt(sim, "parallel", s.sim.parallel);
  }
  if (!(s.sim.dt > 0.0)) throw ScenarioError("sim.dt must be positive");
  if (s.sim.max_steps < 0) throw ScenarioError("sim.max_steps must be >= 0");
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// ---------------------------------------------------------------------------
// Expansion and validation.
// ---------------------------------------------------------------------------

DistanceBand formation_band(const Scenario& s, std::size_t a, std::size_t b) {
  const ScaleBounds sb = scale_bounds(s.payload);
  const CurvilinearOffset ca = s.offset_of(a);
  const CurvilinearOffset cb = s.offset_of(b);
  const double desired = std::hypot(ca.s - cb.s, ca.q - cb.q);
  return pairwise_distance_bounds(sb, desired, s.collision_distance, s.camera_range);
}

std::vector<FollowerConstraints> build_constraints(const Scenario& s) {
  std::vector<FollowerConstraints> out;
  for (std::size_t i : s.follower_indices()) {
    FollowerConstraints fc;
    fc.robot = i;
    for (std::size_t j = 0; j < s.robots.size(); ++j) {
      if (j != i) fc.neighbor_robots.push_back(j);
    }
    auto slot_of = [&fc](std::size_t robot) {
      const auto it = std::find(fc.neighbor_robots.begin(), fc.neighbor_robots.end(), robot);
      return static_cast<std::size_t>(it - fc.neighbor_robots.begin());
    };
    for (const auto& d : s.constraints) {
      if (!d.followers.empty() &&
          std::find(d.followers.begin(), d.followers.end(), i) == d.followers.end()) {
        continue;
      }
      auto fail = [&d](const std::string& why) { throw ScenarioError(why, d.line); };
      auto make_base = [&](ConstraintKind kind) {
        ConstraintSpec spec;
        spec.kind = kind;
        spec.lower = d.lower;
        spec.upper = d.upper;
        spec.margin = d.margin;
        return spec;
      };
      const ConstraintKind kind = d.type == ConstraintDecl::Type::kTwoSided
                                      ? ConstraintKind::kTwoSided
                                  : d.type == ConstraintDecl::Type::kUpper
                                      ? ConstraintKind::kUpperBounded
                                      : ConstraintKind::kLowerBounded;
      try {
        switch (d.selector) {
          case SelectorType::kObstacleDistance: {
            ConstraintSpec spec = make_base(kind);
            spec.selector = MeasurementSelector::obstacle();
            spec.label = d.label.empty() ? "obstacle" : d.label;
            fc.set.add(spec);
            break;
          }
          case SelectorType::kLinkDistance: {
            if (s.robots[i].links.empty()) {
              fail("link constraint declared but robot '" + s.robots[i].name +
                   "' has no links");
            }
            std::vector<std::size_t> partners;
            for (std::size_t r : s.robots[i].links) {
              if (r == i) fail("a robot cannot link to itself");
              partners.push_back(slot_of(r));
            }
            ConstraintSpec spec = make_base(kind);
            spec.selector = MeasurementSelector::link(partners);
            spec.label = d.label.empty() ? "link" : d.label;
            fc.set.add(spec);
            break;
          }
          case SelectorType::kPairwiseDistance: {
            std::vector<std::size_t> targets =
                d.neighbors.empty() ? fc.neighbor_robots : d.neighbors;
            for (std::size_t j : targets) {
              if (j == i) continue;
              const std::string label =
                  (d.label.empty() ? std::string(d.type == ConstraintDecl::Type::kMixed
                                                     ? "mixed"
                                                     : "pairwise")
                                   : d.label) +
                  ":" + s.robots[j].name;
              if (d.type == ConstraintDecl::Type::kMixed) {
                fc.set.add(make_mixed_constraint(d.mixed, slot_of(j), s.gains.v_bar,
                                                 s.gains.omega_bar, d.margin, label));
                continue;
              }
              ConstraintSpec spec = make_base(kind);
              if (d.formation_bounds) {
                const DistanceBand band = formation_band(s, i, j);
                spec.lower = band.lower;
                spec.upper = band.upper;
              }
              spec.selector = MeasurementSelector::pairwise(slot_of(j));
              spec.label = label;
              fc.set.add(spec);
            }
            break;
          }
          case SelectorType::kCustom:
            fail("custom selectors cannot be declared in scenario files");
        }
      } catch (const ScenarioError&) {
        throw;
      } catch (const Error& e) {
        throw ScenarioError(std::string(e.what()) + " (follower " + s.robots[i].name + ")",
                            d.line);
      }
    }
    out.push_back(std::move(fc));
  }
  return out;
}

std::string ValidationReport::to_string() const {
  std::ostringstream o;
  if (scale) {
    o << "scale bounds: R_min = " << scale->r_min_radius << " m, r- = " << scale->r_minus
      << ", r+ = " << scale->r_plus << "\n";
  }
  for (std::size_t k = 0; k < initial_beta.size(); ++k) {
    o << "initial beta[" << k << "] = " << initial_beta[k] << "\n";
  }
  for (const auto& n : notes) o << "note: " << n << "\n";
  for (const auto& w : warnings) o << "warning: " << w << "\n";
  for (const auto& e : errors) o << "error: " << e << "\n";
  o << (ok() ? "scenario OK" : "scenario INVALID") << "\n";
  return o.str();
}

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport r;
  try {
    s.world.validate();
  } catch (const Error& e) {
    r.errors.emplace_back(e.what());
  }
  try {
    r.scale = scale_bounds(s.payload);
  } catch (const Error& e) {
    r.errors.emplace_back(e.what());
  }
  if (r.scale) {
    auto compare = [&r](const char* what, double reported, double derived) {
      std::ostringstream m;
      m << what << " reported as " << reported << " but the payload geometry gives "
        << derived;
      if (std::abs(reported - derived) > 0.01) {
        r.warnings.push_back(m.str() + "; the derived value is used");
      } else {
        r.notes.push_back(m.str());
      }
    };
    if (s.reported_r_plus) compare("r+", *s.reported_r_plus, r.scale->r_plus);
    if (s.reported_r_minus) compare("r-", *s.reported_r_minus, r.scale->r_minus);
    for (std::size_t i : s.follower_indices()) {
      for (std::size_t j = 0; j < s.robots.size(); ++j) {
        if (j == i || (s.robots[j].role == Role::kFollower && j < i)) continue;
        try {
          const DistanceBand b = formation_band(s, i, j);
          std::ostringstream m;
          m << "band " << s.robots[i].name << "-" << s.robots[j].name << ": ["
            << b.lower << ", " << b.upper << "] m";
          r.notes.push_back(m.str());
        } catch (const Error& e) {
          r.errors.push_back(s.robots[i].name + "-" + s.robots[j].name + ": " + e.what());
        }
      }
    }
  }
  for (auto& v : s.leader.check(s.lidar.range, s.payload.formation_radius)) {
    r.errors.push_back("leader parameters: " + v);
  }
  const auto offsets = s.follower_offsets();
  for (auto& v : validate_gains(s.gains, s.leader, offsets)) {
    r.errors.push_back("gains: " + v);
  }
  if (!(s.camera.fov > 0.0 && s.camera.fov < kPi)) {
    r.errors.emplace_back("camera fov must lie in (0, pi)");
  }
  if (!(s.camera.deadband > 0.0 && s.camera.gain > 0.0)) {
    r.errors.emplace_back("camera deadband and gain must be positive");
  }
  if (s.lidar.beams < 8) r.errors.emplace_back("lidar needs at least 8 beams");
  if (!r.errors.empty()) return r;

  try {
    const auto betas = initial_betas(s);
    r.initial_beta = betas;
    const auto followers = s.follower_indices();
    for (std::size_t k = 0; k < betas.size(); ++k) {
      if (betas[k] > s.gains.beta_threshold) {
        std::ostringstream m;
        m << "follower " << s.robots[followers[k]].name << " starts with beta = " << betas[k]
          << " > beta_t = " << s.gains.beta_threshold;
        r.errors.push_back(m.str());
      }
    }
  } catch (const Error& e) {
    r.errors.emplace_back(e.what());
  }
  return r;
}

}  // namespace cotransport
