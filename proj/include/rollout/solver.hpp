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

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rollout/catalog.hpp"
#include "rollout/exposure.hpp"
#include "rollout/schedules.hpp"

namespace rollout {

// Absolute tolerance on the utility floor used by callers that check a
// returned slate.
inline constexpr double kFloorTolerance = 1e-9;

// Objective differences below this are ties; ties resolve to the slate with
// the lexicographically smallest sorted item indices.
inline constexpr double kTieTolerance = 1e-12;

// Largest number of k-subsets the exhaustive solvers will enumerate.
inline constexpr std::uint64_t kBruteForceLimit = 1'000'000;

// One customer arrival's slate selection problem. The customer's slate x
// (|x| = k) minimizes
//
//   sum_s | exposure[s] + x_s / k - (arrivals_so_far + 1) * target_share[s] |
//
// subject to sum_{s in x} relevance[s] >= floor. With a producer map the
// sum runs over producers instead, on aggregated exposure and target share.
struct SelectionInstance {
  CustomerIndex customer = 0;
  std::vector<double> exposure;      // step-local exposure so far
  std::uint64_t arrivals_so_far = 0;
  std::vector<double> target_share;  // target distribution of the step
  std::vector<double> relevance;     // new-model scores of this customer
  std::size_t k = 0;
  double theta = 0.0;
  double floor = 0.0;                // theta * max_utility(relevance, k)

  // Optional producer grouping for the producer-level objective.
  std::shared_ptr<const ProducerMap> producers;

  // Items the solver may pick, ascending. Empty means every item. Items left
  // out keep x_s = 0 and still contribute their fixed cost.
  std::vector<ItemIndex> candidates;

  std::size_t num_items() const { return relevance.size(); }
  double target(ItemIndex s) const {
    return static_cast<double>(arrivals_so_far + 1) * target_share[s];
  }
  // Change in the item-level objective from selecting s.
  double delta(ItemIndex s) const;
  std::vector<ItemIndex> candidate_items() const;

  void validate() const;
};

// Assemble the instance for customer u arriving during step `step` given
// the step-local ledger. Throws PlanError if the plan has no target yet.
SelectionInstance build_instance(const ExposureLedger& ledger,
                                 const RolloutPlan& plan, int step,
                                 CustomerIndex u, const RelevancePair& pair,
                                 std::size_t k,
                                 std::shared_ptr<const ProducerMap> producers = nullptr);

// Objective values of a slate (full sums over all items or producers).
double objective(const SelectionInstance& inst, std::span<const ItemIndex> items);
double producer_objective(const SelectionInstance& inst,
                          std::span<const ItemIndex> items);

// Exact minimizer of the item-level objective. Branch and bound over the
// candidate items in index order with suffix bounds on the cheapest
// completion and on the best reachable relevance.
Recommendation solve_exact(const SelectionInstance& inst);

// Exact minimizer of the producer-level objective. Throws InvalidArgument
// when the instance carries no producer map.
Recommendation solve_producer_level(const SelectionInstance& inst);

// Exhaustive enumeration oracles with the same objective, feasibility and
// tie rules. Throw SizeLimit above kBruteForceLimit subsets.
Recommendation brute_force(const SelectionInstance& inst);
Recommendation brute_force_producer_level(const SelectionInstance& inst);

// Restrict the candidate items to the union of the top k^2 items by
// relevance and the top k^2 items by |exposure share - target share|.
// Instances with at most k^2 items come back unchanged.
SelectionInstance prefilter(const SelectionInstance& inst);

}  // namespace rollout
