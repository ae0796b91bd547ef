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

#ifndef COTRANSPORT_BENCH_H_
#define COTRANSPORT_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cotransport/scenario.h"

namespace cotransport {

struct BenchConfig {
  std::vector<std::size_t> constraint_counts = {4, 8, 16, 32, 64};
  std::vector<std::size_t> robot_counts = {2, 4, 8, 16};
  std::size_t repetitions = 30;
  std::size_t inner_iterations = 200;   // minimum calls timed together
  double min_batch_us = 2000.0;         // batches grow until they last this long
  long scenario_steps = 3000;           // steps of the optional scenario run
  std::uint64_t seed = 7;
};

struct BenchRow {
  std::string family;  // "constraints", "leader", "follower", "scenario"
  std::string config;  // e.g. "n=16", "robots=4", "F1"
  double mean_us = 0.0;
  double std_us = 0.0;
  double median_us = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  LinearFit constraint_fit;
  std::vector<double> doubling_ratios;
  double leader_spread = 0.0;    // (max - min) / min of medians over robot counts
  double follower_spread = 0.0;
  double tracking_mean_us = 0.0;    // pooled over followers of the scenario run
  double generation_mean_us = 0.0;  // pooled over followers of the scenario run
  bool scenario_timed = false;

  bool linear_ok() const;
  bool flat_ok() const;
  bool absolute_ok() const;
};

/// Least-squares line through (x, y) with its coefficient of determination.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Synthetic sweeps over constraint count and robot count, plus per-robot
/// and pooled step timings of `scenario` when one is given. Throws Error if
/// repetitions < 10.
BenchReport run_bench(const BenchConfig& cfg, const Scenario* scenario = nullptr);

void write_bench_csv(std::ostream& os, const BenchReport& r);
void write_bench_summary(std::ostream& os, const BenchReport& r);

}  // namespace cotransport

#endif  // COTRANSPORT_BENCH_H_
