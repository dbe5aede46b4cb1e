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

#include "rollout/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "rollout/errors.hpp"

namespace rollout {

namespace {

double total(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum;
}

}  // namespace

std::optional<double> path_length(const StepSeries& series) {
  if (!(series.ec_immediate > 0.0)) return std::nullopt;
  return total(series.step_ec) / series.ec_immediate;
}

std::optional<double> max_transition_cost(const StepSeries& series) {
  if (!(series.ec_immediate > 0.0) || series.step_ec.empty()) {
    return std::nullopt;
  }
  return *std::max_element(series.step_ec.begin(), series.step_ec.end()) /
         series.ec_immediate;
}

std::optional<double> transition_inequality(const StepSeries& series) {
  const double m = total(series.step_ec);
  if (!(m > 0.0)) return std::nullopt;
  double z = 0.0;
  for (double ec : series.step_ec) {
    if (ec <= 0.0) continue;
    const double p = ec / m;
    z -= p * std::log10(p);
  }
  return z;
}

UtilityStats summarize(std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("summarize: no samples");
  UtilityStats st;
  st.count = samples.size();
  const double n = static_cast<double>(samples.size());
  st.mean = total(samples) / n;
  double sq = 0.0;
  for (double x : samples) sq += (x - st.mean) * (x - st.mean);
  st.std = std::sqrt(sq / n);
  st.min = *std::min_element(samples.begin(), samples.end());
  return st;
}

std::vector<std::optional<UtilityStats>> utility_stats(
    const std::vector<std::vector<double>>& per_step) {
  std::vector<std::optional<UtilityStats>> out;
  out.reserve(per_step.size());
  for (const auto& samples : per_step) {
    if (samples.empty()) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(summarize(samples));
    }
  }
  return out;
}

MetricsBlock compute_metrics(const StepSeries& series) {
  MetricsBlock block;
  block.upsilon = path_length(series);
  block.pi = max_transition_cost(series);
  block.z = transition_inequality(series);
  block.ec_immediate = series.ec_immediate;
  block.step_ec = series.step_ec;
  block.utility = utility_stats(series.utility);
  return block;
}

}  // namespace rollout
