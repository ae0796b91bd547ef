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

#ifndef COTRANSPORT_TELEMETRY_H_
#define COTRANSPORT_TELEMETRY_H_

#include <ostream>
#include <string>
#include <vector>

#include "cotransport/simulation.h"

namespace cotransport {

/// Column names of the telemetry CSV, in order.
const std::vector<std::string>& telemetry_columns();

/// Writes the header and one row per record. Numbers use 9 significant
/// digits; not-applicable fields are empty. Lines end with '\n'.
void write_telemetry_csv(std::ostream& os, const std::vector<TelemetryRecord>& records,
                         const Scenario& s);

void write_timing_csv(std::ostream& os, const std::vector<TimingRecord>& records,
                      const Scenario& s);

/// Plain-text run summary including every stored violation.
void write_summary(std::ostream& os, const RunSummary& summary);

/// Writes errors.csv, distances.csv, velocities.csv and camera.csv into
/// `dir`, each with one row per record. Returns the paths written.
std::vector<std::string> emit_plots_data(const std::string& dir,
                                         const std::vector<TelemetryRecord>& records,
                                         const Scenario& s);

/// Fixed-width decimal formatting used across every CSV: 9 significant
/// digits, empty for NaN.
std::string format_number(double x);

}  // namespace cotransport

#endif  // COTRANSPORT_TELEMETRY_H_
