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

#include "rollout/schedules.hpp"

#include <cmath>
#include <string>

#include "rollout/errors.hpp"

namespace rollout {

std::string_view to_string(TargetMode mode) {
  return mode == TargetMode::kEstimated ? "estimated" : "preserving";
}

std::string_view to_string(ThetaMode mode) {
  return mode == ThetaMode::kLinear ? "linear" : "geometric";
}

TargetMode parse_target_mode(std::string_view text) {
  if (text == "estimated") return TargetMode::kEstimated;
  if (text == "preserving") return TargetMode::kPreserving;
  throw InvalidArgument("unknown targets mode '" + std::string(text) + "'");
}

ThetaMode parse_theta_mode(std::string_view text) {
  if (text == "linear") return ThetaMode::kLinear;
  if (text == "geometric") return ThetaMode::kGeometric;
  throw InvalidArgument("unknown theta mode '" + std::string(text) + "'");
}

Distribution predict_final_distribution(const ScoreMatrix& new_scores,
                                        std::span<const Arrival> warmup,
                                        std::size_t k) {
  if (warmup.empty()) throw EmptyWindow("warm-up window has no arrivals");
  ExposureLedger ledger(new_scores.cols(), k, -1.0, 0.0);
  for (const Arrival& a : warmup) {
    ledger.record(Recommendation(a.customer, top_k(new_scores.row(a.customer), k)));
  }
  return ledger.distribution();
}

std::vector<Distribution> estimated_targets(const Distribution& d0,
                                            const Distribution& dpred,
                                            int eta) {
  if (eta < 1) throw InvalidArgument("estimated_targets: eta must be >= 1");
  if (d0.size() != dpred.size()) {
    throw InvalidArgument("estimated_targets: universes differ");
  }
  d0.validate(1e-9);
  dpred.validate(1e-9);
  const std::size_t n = d0.size();
  std::vector<double> delta(n);
  for (std::size_t s = 0; s < n; ++s) delta[s] = (dpred[s] - d0[s]) / eta;

  std::vector<Distribution> out;
  out.reserve(static_cast<std::size_t>(eta));
  for (int i = 1; i < eta; ++i) {
    Distribution d;
    d.mass.resize(n);
    for (std::size_t s = 0; s < n; ++s) d.mass[s] = d0[s] + i * delta[s];
    out.push_back(std::move(d));
  }
  out.push_back(dpred);
  return out;
}

Distribution preserving_target(const Distribution& previous_observed) {
  return previous_observed;
}

double theta_linear(int i, int eta) {
  if (eta < 1 || i < 1 || i > eta) {
    throw PlanError("theta_linear: step " + std::to_string(i) +
                    " outside 1.." + std::to_string(eta));
  }
  return static_cast<double>(i) / eta;
}

double theta_geometric(int i, int eta) {
  if (eta < 1 || i < 1 || i > eta) {
    throw PlanError("theta_geometric: step " + std::to_string(i) +
                    " outside 1.." + std::to_string(eta));
  }
  if (i == eta) return 1.0;
  return 1.0 - std::ldexp(1.0, -i);
}

std::vector<double> theta_schedule(ThetaMode mode, int eta) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(eta));
  for (int i = 1; i <= eta; ++i) {
    out.push_back(mode == ThetaMode::kLinear ? theta_linear(i, eta)
                                             : theta_geometric(i, eta));
  }
  return out;
}

RolloutPlan::RolloutPlan(int eta, TargetMode target_mode, ThetaMode theta_mode)
    : eta_(eta), target_mode_(target_mode), theta_mode_(theta_mode) {
  if (eta < 1) throw InvalidArgument("rollout plan needs eta >= 1");
  theta_ = theta_schedule(theta_mode, eta);
  targets_.resize(static_cast<std::size_t>(eta));
}

RolloutPlan RolloutPlan::estimated(int eta, ThetaMode theta_mode,
                                   const Distribution& d0,
                                   const Distribution& dpred) {
  RolloutPlan plan(eta, TargetMode::kEstimated, theta_mode);
  auto targets = estimated_targets(d0, dpred, eta);
  for (int i = 0; i < eta; ++i) {
    plan.targets_[static_cast<std::size_t>(i)] = std::move(targets[static_cast<std::size_t>(i)]);
  }
  return plan;
}

RolloutPlan RolloutPlan::preserving(int eta, ThetaMode theta_mode) {
  return RolloutPlan(eta, TargetMode::kPreserving, theta_mode);
}

void RolloutPlan::check_step(int step) const {
  if (step < 1 || step > eta_) {
    throw PlanError("step " + std::to_string(step) + " outside 1.." +
                    std::to_string(eta_));
  }
}

double RolloutPlan::theta(int step) const {
  check_step(step);
  return theta_[static_cast<std::size_t>(step - 1)];
}

bool RolloutPlan::has_target(int step) const {
  return step >= 1 && step <= eta_ &&
         targets_[static_cast<std::size_t>(step - 1)].has_value();
}

const Distribution& RolloutPlan::target(int step) const {
  check_step(step);
  const auto& t = targets_[static_cast<std::size_t>(step - 1)];
  if (!t) throw PlanError("no target set for step " + std::to_string(step));
  return *t;
}

void RolloutPlan::set_target(int step, Distribution target) {
  check_step(step);
  if (target_mode_ != TargetMode::kPreserving) {
    throw PlanError("estimated plans are fixed at construction");
  }
  if (step > 1 && !has_target(step - 1)) {
    throw PlanError("targets must be set in step order");
  }
  targets_[static_cast<std::size_t>(step - 1)] = std::move(target);
}

}  // namespace rollout
