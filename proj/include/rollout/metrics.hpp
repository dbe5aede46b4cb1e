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

#include <optional>
#include <span>
#include <vector>

namespace rollout {

// Per-step exposure changes of one rollout and the normalized utilities of
// the arrivals served in each step.
struct StepSeries {
  std::vector<double> step_ec;  // EC(i-1, i), i = 1..eta
  double ec_immediate = 0.0;    // EC(0, eta)
  std::vector<std::vector<double>> utility;  // per step, per arrival
};

// The three producer-side metrics are undefined (nullopt) when their
// denominator is zero.

// Total path length relative to the direct change.
std::optional<double> path_length(const StepSeries& series);
// Largest single step relative to the direct change.
std::optional<double> max_transition_cost(const StepSeries& series);
// Base-10 entropy of the step changes normalized by their sum. Zero steps
// contribute nothing.
std::optional<double> transition_inequality(const StepSeries& series);

struct UtilityStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double min = 0.0;
  std::size_t count = 0;
};

UtilityStats summarize(std::span<const double> samples);
// One entry per step; steps without samples are nullopt.
std::vector<std::optional<UtilityStats>> utility_stats(
    const std::vector<std::vector<double>>& per_step);

struct MetricsBlock {
  std::optional<double> upsilon;
  std::optional<double> pi;
  std::optional<double> z;
  double ec_immediate = 0.0;
  std::vector<double> step_ec;
  std::vector<std::optional<UtilityStats>> utility;
};

MetricsBlock compute_metrics(const StepSeries& series);

}  // namespace rollout
