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

#include "rollout/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "rollout/errors.hpp"

namespace rollout {

std::vector<std::size_t> CanaryAssignment::cohort_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(eta), 0);
  for (int step : switch_step) ++sizes[static_cast<std::size_t>(step - 1)];
  return sizes;
}

CanaryAssignment cand_assign(std::size_t num_customers, int eta,
                             std::uint64_t seed) {
  if (eta < 1) throw InvalidArgument("cand_assign: eta must be >= 1");
  std::vector<CustomerIndex> order(num_customers);
  std::iota(order.begin(), order.end(), CustomerIndex{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  CanaryAssignment a;
  a.eta = eta;
  a.switch_step.assign(num_customers, 0);
  const std::size_t cohorts = static_cast<std::size_t>(eta);
  const std::size_t base = num_customers / cohorts;
  const std::size_t extra = num_customers % cohorts;
  std::size_t next = 0;
  for (std::size_t j = 0; j < cohorts; ++j) {
    const std::size_t size = base + (j < extra ? 1 : 0);
    for (std::size_t c = 0; c < size; ++c) {
      a.switch_step[order[next++]] = static_cast<int>(j + 1);
    }
  }
  return a;
}

Recommendation cand_recommend(CustomerIndex u, int current_step,
                              const CanaryAssignment& assignment,
                              const RelevancePair& pair, std::size_t k) {
  if (u >= assignment.switch_step.size()) {
    throw InvalidArgument("cand_recommend: customer outside assignment");
  }
  const ScoreMatrix& model =
      assignment.switched(u, current_step) ? pair.new_scores : pair.old_scores;
  return Recommendation(u, top_k(model.row(u), k));
}

namespace {

void check_irf_step(int i, int eta) {
  if (eta < 1 || i < 0 || i > eta) {
    throw InvalidArgument("irf_relevance: step " + std::to_string(i) +
                          " outside 0.." + std::to_string(eta));
  }
}

}  // namespace

std::vector<double> irf_row(const RelevancePair& pair, CustomerIndex u, int i,
                            int eta) {
  check_irf_step(i, eta);
  auto old_row = pair.old_scores.row(u);
  auto new_row = pair.new_scores.row(u);
  if (i == 0) return {old_row.begin(), old_row.end()};
  if (i == eta) return {new_row.begin(), new_row.end()};
  const double w = static_cast<double>(i) / eta;
  std::vector<double> mixed(old_row.size());
  for (std::size_t s = 0; s < mixed.size(); ++s) {
    mixed[s] = (1.0 - w) * old_row[s] + w * new_row[s];
  }
  return mixed;
}

ScoreMatrix irf_relevance(const RelevancePair& pair, int i, int eta) {
  check_irf_step(i, eta);
  if (i == 0) return pair.old_scores;
  if (i == eta) return pair.new_scores;
  ScoreMatrix mixed(pair.old_scores.rows(), pair.old_scores.cols());
  for (std::size_t u = 0; u < mixed.rows(); ++u) {
    const auto row = irf_row(pair, u, i, eta);
    std::copy(row.begin(), row.end(), mixed.row(u).begin());
  }
  return mixed;
}

}  // namespace rollout
