// Copyright 2026 The Exposure Rollout Authors.
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

#pragma once

#include <filesystem>
#include <string>

#include "rollout/runner.hpp"

namespace rollout {

// report.json contents. Key order is fixed and doubles print in shortest
// round-trip form, so equal reports serialize to equal bytes. The output
// directory is not echoed.
std::string report_json(const RunReport& report);
std::string impact_json(const ImpactResult& impact);
std::string sweep_json(const SweepResult& result);

// Writes report.json, step_ec.csv, utility.csv and exposure_by_step.csv
// into dir (created if needed), plus solves.csv when the config asks for it.
void write_outputs(const RunReport& report, const std::filesystem::path& dir);

// sweep.csv (one row per run) and sweep_summary.csv (one row per eta).
void write_sweep(const SweepResult& result, const std::filesystem::path& dir);

}  // namespace rollout
