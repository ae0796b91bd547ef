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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cotransport/bench.h"
#include "cotransport/scenario.h"
#include "cotransport/simulation.h"
#include "cotransport/telemetry.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<long> steps;
  std::optional<double> dt;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool scenario_required) {
  auto* opt = cmd->add_option("--scenario", f.scenario, "scenario YAML file");
  if (scenario_required) opt->required();
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "override sim.seed");
  cmd->add_option("--steps", f.steps, "override sim.max_steps");
  cmd->add_option("--dt", f.dt, "override sim.dt");
}

cotransport::Scenario load(const CommonFlags& f) {
  cotransport::Scenario s = cotransport::load_scenario_file(f.scenario);
  if (f.seed) s.sim.seed = *f.seed;
  if (f.steps) s.sim.max_steps = *f.steps;
  if (f.dt) s.sim.dt = *f.dt;
  return s;
}

std::ofstream open_file(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw cotransport::Error("cannot write " + p.string());
  return f;
}

int cmd_run(const CommonFlags& f, bool parallel, bool plots) {
  cotransport::Scenario s = load(f);
  if (parallel) s.sim.parallel = true;
  cotransport::Simulation sim(s);
  const cotransport::RunSummary summary = sim.run();

  namespace fs = std::filesystem;
  fs::create_directories(f.out);
  {
    auto out = open_file(fs::path(f.out) / "telemetry.csv");
    cotransport::write_telemetry_csv(out, sim.telemetry(), s);
  }
  {
    auto out = open_file(fs::path(f.out) / "timing.csv");
    cotransport::write_timing_csv(out, sim.timing(), s);
  }
  {
    auto out = open_file(fs::path(f.out) / "summary.txt");
    cotransport::write_summary(out, summary);
  }
  if (plots) cotransport::emit_plots_data((fs::path(f.out) / "plots").string(), sim.telemetry(), s);
  cotransport::write_summary(std::cout, summary);
  return summary.violation_count == 0 ? kExitOk : kExitViolation;
}

int cmd_validate(const CommonFlags& f) {
  const cotransport::Scenario s = load(f);
  const cotransport::ValidationReport r = cotransport::validate_scenario(s);
  std::cout << r.to_string();
  return r.ok() ? kExitOk : kExitConfig;
}

int cmd_bench(const CommonFlags& f, const cotransport::BenchConfig& cfg) {
  std::optional<cotransport::Scenario> s;
  if (!f.scenario.empty()) s = load(f);
  const cotransport::BenchReport r = cotransport::run_bench(cfg, s ? &*s : nullptr);
  namespace fs = std::filesystem;
  fs::create_directories(f.out);
  {
    auto out = open_file(fs::path(f.out) / "bench.csv");
    cotransport::write_bench_csv(out, r);
  }
  {
    auto out = open_file(fs::path(f.out) / "bench_summary.txt");
    cotransport::write_bench_summary(out, r);
  }
  cotransport::write_bench_csv(std::cout, r);
  cotransport::write_bench_summary(std::cout, r);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leader-follower cooperative transport simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags, validate_flags, bench_flags;
  bool parallel = false;
  bool no_plots = false;
  auto* run = app.add_subcommand("run", "simulate a scenario and write telemetry");
  add_common(run, run_flags, true);
  run->add_flag("--parallel", parallel, "evaluate followers concurrently");
  run->add_flag("--no-plots", no_plots, "skip the per-figure CSV bundle");

  auto* validate = app.add_subcommand("validate", "check a scenario without running it");
  add_common(validate, validate_flags, true);

  cotransport::BenchConfig bench_cfg;
  auto* bench = app.add_subcommand("bench", "time the controller and trajectory generation");
  add_common(bench, bench_flags, false);
  bench->add_option("--repetitions", bench_cfg.repetitions, "timed repetitions (>= 10)");
  bench->add_option("--inner", bench_cfg.inner_iterations, "minimum calls per timed batch");
  bench->add_option("--min-batch-us", bench_cfg.min_batch_us, "minimum duration of a timed batch");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags, parallel, !no_plots);
    if (*validate) return cmd_validate(validate_flags);
    if (*bench) {
      if (bench_flags.steps) bench_cfg.scenario_steps = *bench_flags.steps;
      return cmd_bench(bench_flags, bench_cfg);
    }
  } catch (const cotransport::ScenarioError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const cotransport::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
