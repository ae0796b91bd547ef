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

#include "cotransport/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>

#include "cotransport/simulation.h"
#include "cotransport/telemetry.h"

namespace cotransport {

namespace {

using Clock = std::chrono::steady_clock;

// Keeps timed loops from being optimized away.
volatile double g_sink = 0.0;

struct Stats {
  double mean = 0.0;
  double std = 0.0;
  double median = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

// A timed unit of work. `calls` is how many measured operations one run
// of `fn` performs.
struct Job {
  std::function<void()> fn;
  double calls = 1.0;
  std::size_t inner = 1;
};

// Times every job in round-robin batches, so that slow spells of the machine
// hit all configurations alike. Each job's batch size is first doubled
// until a batch lasts `min_batch_us`. Returns microseconds per operation,
// one entry per repetition, for each job.
std::vector<std::vector<double>> time_interleaved(std::vector<Job>& jobs, std::size_t reps,
                                                  std::size_t min_inner, double min_batch_us) {
  auto batch = [](Job& j) {
    const auto start = Clock::now();
    for (std::size_t i = 0; i < j.inner; ++i) j.fn();
    return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
  };
  for (auto& j : jobs) {
    j.inner = std::max<std::size_t>(min_inner, 1);
    while (batch(j) < min_batch_us) j.inner *= 2;
  }
  std::vector<std::vector<double>> out(jobs.size());
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      out[k].push_back(batch(jobs[k]) / (static_cast<double>(jobs[k].inner) * jobs[k].calls));
    }
  }
  return out;
}

// Neighbors scattered on an annulus so that a share of the pairwise
// constraints sits inside its ramp and contributes to the gradient.
RobotContext synthetic_context(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> radius(0.7, 2.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  RobotContext ctx;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = radius(rng), a = angle(rng);
    ctx.neighbors.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return ctx;
}

ConstraintSet synthetic_set(std::size_t n) {
  ConstraintSet set;
  for (std::size_t k = 0; k < n; ++k) {
    ConstraintSpec c;
    c.kind = ConstraintKind::kLowerBounded;
    c.lower = 0.4;
    c.margin = 0.8;
    c.selector = MeasurementSelector::pairwise(k);
    c.label = "pair" + std::to_string(k);
    set.add(c);
  }
  return set;
}

// Leader history that curves gently, long enough for every offset used.
TrajectoryBuffer synthetic_history(double dt) {
  TrajectoryBuffer buf(2000);
  Pose2D p(Vector2(0.0, 0.0), 0.0);
  for (int k = 0; k < 1500; ++k) {
    const double omega = 0.3 * std::sin(0.01 * k);
    buf.push(LeaderSample{p, 0.5, omega, k * dt});
    p = integrate_pose(p, 0.5, omega, dt);
  }
  return buf;
}

// Fixed surroundings for the leader. Robots are left out of the scan, as in
// the default lidar setup, so the scan does not change with team size.
ScanResult synthetic_scan() {
  WorldModel w;
  w.obstacles.emplace_back(CircleObstacle{Vector2(3.0, 1.0), 1.0});
  w.obstacles.emplace_back(PolygonObstacle{{Vector2(-2, -4), Vector2(2, -4), Vector2(2, -3),
                                            Vector2(-2, -3)}});
  RobotState s;
  return simulate_lidar(s, w, 8.0, 360);
}

double spread(const std::vector<double>& medians) {
  const auto [lo, hi] = std::minmax_element(medians.begin(), medians.end());
  return *lo > 0.0 ? (*hi - *lo) / *lo : 0.0;
}

}  // namespace

bool BenchReport::linear_ok() const {
  if (constraint_fit.r2 < 0.9 || doubling_ratios.empty()) return false;
  return std::all_of(doubling_ratios.begin(), doubling_ratios.end(),
                     [](double r) { return r >= 1.3 && r <= 2.7; });
}

bool BenchReport::flat_ok() const { return leader_spread < 0.5 && follower_spread < 0.5; }

bool BenchReport::absolute_ok() const {
  return scenario_timed && tracking_mean_us < 1000.0 && generation_mean_us < 500.0;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return f;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 0.0;
  return f;
}

BenchReport run_bench(const BenchConfig& cfg, const Scenario* scenario) {
  if (cfg.repetitions < 10) throw Error("bench needs at least 10 repetitions");
  BenchReport report;
  std::mt19937_64 rng(cfg.seed);

  double sink = 0.0;

  std::vector<double> xs;
  std::vector<Job> sweep;
  std::vector<RobotContext> contexts;
  std::vector<ConstraintSet> sets;
  for (std::size_t n : cfg.constraint_counts) {
    contexts.push_back(synthetic_context(n, rng));
    sets.push_back(synthetic_set(n));
    xs.push_back(static_cast<double>(n));
  }
  std::vector<ConstraintEvaluation> evals(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sweep.push_back({[&, k] {
      evaluate_into(contexts[k], sets[k], EvaluationOptions{}, evals[k]);
      sink += evals[k].tau.x();
    }});
  }
  const auto sweep_times =
      time_interleaved(sweep, cfg.repetitions, cfg.inner_iterations, cfg.min_batch_us);
  std::vector<double> medians;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const Stats s = stats_of(sweep_times[k]);
    report.rows.push_back({"constraints", "n=" + std::to_string(cfg.constraint_counts[k]), s.mean,
                           s.std, s.median});
    medians.push_back(s.median);
  }
  report.constraint_fit = fit_line(xs, medians);
  for (std::size_t i = 1; i < medians.size(); ++i) {
    if (xs[i] == 2.0 * xs[i - 1] && medians[i - 1] > 0.0) {
      report.doubling_ratios.push_back(medians[i] / medians[i - 1]);
    }
  }

  const double dt = 0.02;
  const TrajectoryBuffer history = synthetic_history(dt);
  const LeaderParams leader;
  // Every lane sits at the same depth, so the buffer walk per follower is
  // the same for every team size.
  const std::vector<CurvilinearOffset> lanes = {{-1.5, 1.0}, {-1.5, -1.0}, {-1.5, 0.0},
                                                {-1.5, 1.5}, {-1.5, -1.5}, {-1.5, 0.5}};
  const ScanResult scan = synthetic_scan();
  const Pose2D pose(Vector2(0.0, 0.0), 0.3);
  const Vector2 goal(25.0, 25.0);
  RelativePoseMeasurement meas;
  meas.relative_position = Vector2(1.0, 0.2);

  // Per team size: one leader job and one job generating for the whole team,
  // where each follower works on its own received copy of the history.
  std::vector<BroadcastChannel> channels;
  for (std::size_t m : cfg.robot_counts) {
    channels.emplace_back(std::max<std::size_t>(m, 2) - 1, history.capacity());
    channels.back().record_transmission(0, history);
  }
  std::vector<Job> teams;
  for (std::size_t k = 0; k < cfg.robot_counts.size(); ++k) {
    teams.push_back({[&] { sink += leader_step(scan, pose, goal, leader).cmd.omega; }});
    BroadcastChannel& ch = channels[k];
    teams.push_back({[&] {
                       for (std::size_t j = 0; j < ch.subscriber_count(); ++j) {
                         sink += generate_reference(ch.buffer(j), lanes[j % lanes.size()], meas).v_r;
                       }
                     },
                     static_cast<double>(ch.subscriber_count())});
  }
  const auto team_times =
      time_interleaved(teams, cfg.repetitions, cfg.inner_iterations, cfg.min_batch_us);
  std::vector<double> leader_medians, follower_medians;
  for (std::size_t k = 0; k < cfg.robot_counts.size(); ++k) {
    const std::string label = "robots=" + std::to_string(cfg.robot_counts[k]);
    const Stats ls = stats_of(team_times[2 * k]), fs = stats_of(team_times[2 * k + 1]);
    report.rows.push_back({"leader", label, ls.mean, ls.std, ls.median});
    report.rows.push_back({"follower", label, fs.mean, fs.std, fs.median});
    leader_medians.push_back(ls.median);
    follower_medians.push_back(fs.median);
  }
  g_sink = sink;
  report.leader_spread = spread(leader_medians);
  report.follower_spread = spread(follower_medians);

  if (scenario != nullptr) {
    Scenario sc = *scenario;
    sc.sim.max_steps = std::min(sc.sim.max_steps, cfg.scenario_steps);
    Simulation sim(sc);
    sim.set_record_telemetry(false);
    sim.run();
    std::map<std::size_t, std::vector<double>> gen, track;
    std::vector<double> pooled_gen, pooled_track;
    for (const auto& t : sim.timing()) {
      gen[t.robot].push_back(t.generation_us);
      if (t.robot != sc.leader_index()) {
        track[t.robot].push_back(t.tracking_us);
        pooled_gen.push_back(t.generation_us);
        pooled_track.push_back(t.tracking_us);
      }
    }
    for (const auto& [robot, v] : gen) {
      const Stats g = stats_of(v);
      report.rows.push_back({"scenario", sc.robots[robot].name + ":generation", g.mean, g.std, g.median});
      if (track.count(robot)) {
        const Stats t = stats_of(track[robot]);
        report.rows.push_back({"scenario", sc.robots[robot].name + ":tracking", t.mean, t.std, t.median});
      }
    }
    const Stats pg = stats_of(pooled_gen), pt = stats_of(pooled_track);
    report.rows.push_back({"scenario", "pooled:generation", pg.mean, pg.std, pg.median});
    report.rows.push_back({"scenario", "pooled:tracking", pt.mean, pt.std, pt.median});
    report.generation_mean_us = pg.mean;
    report.tracking_mean_us = pt.mean;
    report.scenario_timed = !pooled_gen.empty();
  }
  return report;
}

void write_bench_csv(std::ostream& os, const BenchReport& r) {
  os << "family,config,mean_us,std_us,median_us\n";
  for (const auto& row : r.rows) {
    os << row.family << ',' << row.config << ',' << format_number(row.mean_us) << ','
       << format_number(row.std_us) << ',' << format_number(row.median_us) << '\n';
  }
}

void write_bench_summary(std::ostream& os, const BenchReport& r) {
  os << "constraint sweep: slope " << format_number(r.constraint_fit.slope)
     << " us/constraint, intercept " << format_number(r.constraint_fit.intercept)
     << " us, R^2 " << format_number(r.constraint_fit.r2) << '\n';
  os << "doubling ratios:";
  for (double d : r.doubling_ratios) os << ' ' << format_number(d);
  os << (r.linear_ok() ? "  [linear: ok]" : "  [linear: FAIL]") << '\n';
  os << "leader step spread over robot counts: " << format_number(100.0 * r.leader_spread)
     << "%\n";
  os << "follower generation spread over robot counts: "
     << format_number(100.0 * r.follower_spread) << "%"
     << (r.flat_ok() ? "  [flat: ok]" : "  [flat: FAIL]") << '\n';
  if (r.scenario_timed) {
    os << "scenario pooled tracking mean: " << format_number(r.tracking_mean_us) << " us\n";
    os << "scenario pooled generation mean: " << format_number(r.generation_mean_us) << " us"
       << (r.absolute_ok() ? "  [absolute: ok]" : "  [absolute: FAIL]") << '\n';
  }
}

}  // namespace cotransport
