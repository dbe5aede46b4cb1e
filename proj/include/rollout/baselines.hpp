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
#include <vector>

#include "rollout/catalog.hpp"

namespace rollout {

// Canary rollout: customers are shuffled and cut into eta cohorts whose
// sizes differ by at most one. Cohort j moves to the new model at step j and
// stays there.
struct CanaryAssignment {
  int eta = 0;
  std::vector<int> switch_step;  // per customer, in 1..eta

  bool switched(CustomerIndex u, int step) const {
    return step >= switch_step[u];
  }
  std::vector<std::size_t> cohort_sizes() const;
};

CanaryAssignment cand_assign(std::size_t num_customers, int eta,
                             std::uint64_t seed);

Recommendation cand_recommend(CustomerIndex u, int current_step,
                              const CanaryAssignment& assignment,
                              const RelevancePair& pair, std::size_t k);

// (1 - i/eta) * old + (i/eta) * new, for 0 <= i <= eta. The endpoints
// return the old and new matrices exactly.
ScoreMatrix irf_relevance(const RelevancePair& pair, int i, int eta);
// One customer's row of irf_relevance.
std::vector<double> irf_row(const RelevancePair& pair, CustomerIndex u, int i,
                            int eta);

}  // namespace rollout
