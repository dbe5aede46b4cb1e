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
#include <string_view>
#include <vector>

#include "rollout/arrivals.hpp"
#include "rollout/catalog.hpp"
#include "rollout/exposure.hpp"

namespace rollout {

enum class TargetMode { kEstimated, kPreserving };
enum class ThetaMode { kLinear, kGeometric };

std::string_view to_string(TargetMode mode);
std::string_view to_string(ThetaMode mode);
TargetMode parse_target_mode(std::string_view text);
ThetaMode parse_theta_mode(std::string_view text);

// Exposure distribution the warm-up arrivals would produce if every one of
// them had been served the top-k of the new model.
Distribution predict_final_distribution(const ScoreMatrix& new_scores,
                                        std::span<const Arrival> warmup,
                                        std::size_t k);

// Straight-line targets from d0 towards dpred: element i-1 is the target of
// step i, d0 + i * (dpred - d0) / eta. The last element equals dpred.
std::vector<Distribution> estimated_targets(const Distribution& d0,
                                            const Distribution& dpred, int eta);

// The previous step's observed distribution, unchanged.
Distribution preserving_target(const Distribution& previous_observed);

// Utility floors for step i in 1..eta.
double theta_linear(int i, int eta);
double theta_geometric(int i, int eta);
std::vector<double> theta_schedule(ThetaMode mode, int eta);

// Per-step targets and floors for one rollout. Estimated plans carry all
// targets up front; preserving plans receive each target when the previous
// step closes.
class RolloutPlan {
 public:
  static RolloutPlan estimated(int eta, ThetaMode theta_mode,
                               const Distribution& d0,
                               const Distribution& dpred);
  static RolloutPlan preserving(int eta, ThetaMode theta_mode);

  int eta() const { return eta_; }
  TargetMode target_mode() const { return target_mode_; }
  ThetaMode theta_mode() const { return theta_mode_; }
  const std::vector<double>& thetas() const { return theta_; }

  // Throws PlanError for steps outside 1..eta or targets not yet set.
  double theta(int step) const;
  const Distribution& target(int step) const;
  bool has_target(int step) const;

  // Preserving plans only; steps must be filled in order.
  void set_target(int step, Distribution target);

 private:
  RolloutPlan(int eta, TargetMode target_mode, ThetaMode theta_mode);
  void check_step(int step) const;

  int eta_;
  TargetMode target_mode_;
  ThetaMode theta_mode_;
  std::vector<double> theta_;
  std::vector<std::optional<Distribution>> targets_;
};

}  // namespace rollout
