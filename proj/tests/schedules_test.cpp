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

#include <doctest.h>

#include <cmath>

#include "rollout/arrivals.hpp"
#include "rollout/errors.hpp"
#include "rollout/schedules.hpp"
#include "test_util.hpp"

using namespace rollout;
using rollout::testing::random_distribution;
using rollout::testing::uniform_row;

TEST_CASE("linear floors") {
  CHECK(theta_linear(5, 10) == 0.5);
  CHECK(theta_linear(10, 10) == 1.0);
  const auto th = theta_schedule(ThetaMode::kLinear, 10);
  for (int i = 1; i <= 10; ++i) CHECK(th[i - 1] == doctest::Approx(i / 10.0).epsilon(1e-15));
  CHECK_THROWS_AS(theta_linear(0, 10), PlanError);
  CHECK_THROWS_AS(theta_linear(11, 10), PlanError);
}

TEST_CASE("geometric floors") {
  CHECK(theta_geometric(1, 10) == 0.5);
  CHECK(theta_geometric(2, 10) == 0.75);
  CHECK(theta_geometric(3, 10) == 0.875);
  CHECK(theta_geometric(10, 10) == 1.0);
  CHECK(theta_geometric(1, 1) == 1.0);
  CHECK_THROWS_AS(theta_geometric(0, 10), PlanError);

  // Iterate the recurrence theta_i = theta_{i-1} + 2^-i from theta_0 = 0.
  double theta = 0.0;
  for (int i = 1; i < 10; ++i) {
    theta += std::ldexp(1.0, -i);
    CHECK(theta_geometric(i, 10) == theta);
  }
}

TEST_CASE("floor schedules are monotone and end at one") {
  for (int eta : {1, 2, 5, 10, 30}) {
    for (auto mode : {ThetaMode::kLinear, ThetaMode::kGeometric}) {
      const auto th = theta_schedule(mode, eta);
      CHECK(th.size() == static_cast<std::size_t>(eta));
      CHECK(th.back() == 1.0);
      for (std::size_t i = 0; i < th.size(); ++i) {
        CHECK(th[i] > 0.0);
        CHECK(th[i] <= 1.0);
        if (i > 0) CHECK(th[i] >= th[i - 1]);
      }
    }
  }
}

TEST_CASE("estimated targets interpolate") {
  const Distribution d0{{1.0, 0.0}};
  const Distribution dp{{0.0, 1.0}};
  const auto t = estimated_targets(d0, dp, 2);
  CHECK(t.size() == 2);
  CHECK(t[0].mass == std::vector<double>{0.5, 0.5});
  CHECK(t[1].mass == std::vector<double>{0.0, 1.0});
  const auto same = estimated_targets(d0, d0, 4);
  for (const auto& d : same) CHECK(d == d0);
  CHECK_THROWS_AS(estimated_targets(d0, Distribution{{1.0}}, 2), InvalidArgument);
}

TEST_CASE("estimated targets match the interpolation oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d0 = random_distribution(rng, 20);
    const auto dp = random_distribution(rng, 20);
    const auto t = estimated_targets(d0, dp, 10);
    CHECK(t.back() == dp);
    const double total_ec = exposure_change(d0, dp);
    for (int i = 1; i <= 10; ++i) {
      double mass = 0.0;
      for (std::size_t s = 0; s < 20; ++s) {
        const double oracle = d0.mass[s] + i * (dp.mass[s] - d0.mass[s]) / 10.0;
        CHECK(t[i - 1].mass[s] == doctest::Approx(oracle).epsilon(1e-13));
        mass += t[i - 1].mass[s];
      }
      CHECK(std::fabs(mass - 1.0) <= 1e-12);
      const auto& prev = i == 1 ? d0 : t[i - 2];
      CHECK(std::fabs(exposure_change(prev, t[i - 1]) - total_ec / 10.0) <= 1e-12);
    }
  }
}

TEST_CASE("predicted final distribution") {
  ScoreMatrix v(3, 4, std::vector<double>{0.9, 0.8, 0.1, 0.2,  //
                                           0.7, 0.9, 0.3, 0.1,  //
                                           0.9, 0.9, 0.0, 0.5});
  const std::vector<Arrival> warm{{-0.9, 0}, {-0.5, 1}, {-0.1, 2}};
  const auto d = predict_final_distribution(v, warm, 2);
  CHECK(d.mass == std::vector<double>{0.5, 0.5, 0.0, 0.0});

  const std::vector<Arrival> one{{-0.3, 1}};
  CHECK(predict_final_distribution(v, one, 1).mass == std::vector<double>{0.0, 1.0, 0.0, 0.0});
  CHECK_THROWS_AS(predict_final_distribution(v, {}, 2), EmptyWindow);
}

TEST_CASE("predicted final distribution matches a replay oracle") {
  std::mt19937_64 rng(32);
  std::vector<double> values;
  for (int u = 0; u < 10; ++u) {
    const auto row = uniform_row(rng, 8);
    values.insert(values.end(), row.begin(), row.end());
  }
  const ScoreMatrix v(10, 8, values);
  const auto trace = generate_trace(std::vector<double>(10, 0.3), 1, 33);
  ExposureLedger ledger(8, 3);
  for (const auto& a : trace.warmup()) {
    ledger.record(Recommendation(a.customer, rollout::testing::sort_then_take(
                                                 std::vector<double>(v.row(a.customer).begin(),
                                                                     v.row(a.customer).end()),
                                                 3)));
  }
  CHECK(predict_final_distribution(v, trace.warmup(), 3) == ledger.distribution());
}

TEST_CASE("preserving plans fill targets in order") {
  auto plan = RolloutPlan::preserving(3, ThetaMode::kLinear);
  const Distribution d0{{0.5, 0.5}};
  CHECK_FALSE(plan.has_target(1));
  CHECK_THROWS_AS(plan.target(1), PlanError);
  CHECK_THROWS_AS(plan.set_target(2, d0), PlanError);
  plan.set_target(1, preserving_target(d0));
  CHECK(plan.target(1) == d0);
  plan.set_target(2, preserving_target(plan.target(1)));
  CHECK(plan.target(2) == d0);
  CHECK(plan.theta(3) == 1.0);
  CHECK_THROWS_AS(plan.theta(4), PlanError);
}

TEST_CASE("estimated plans carry every target") {
  const Distribution d0{{1.0, 0.0}};
  const Distribution dp{{0.0, 1.0}};
  auto plan = RolloutPlan::estimated(4, ThetaMode::kGeometric, d0, dp);
  for (int i = 1; i <= 4; ++i) CHECK(plan.has_target(i));
  CHECK(plan.target(4) == dp);
  CHECK(plan.theta(1) == 0.5);
  CHECK_THROWS_AS(plan.set_target(1, d0), PlanError);
}

TEST_CASE("mode names round-trip") {
  CHECK(parse_target_mode(to_string(TargetMode::kPreserving)) == TargetMode::kPreserving);
  CHECK(parse_theta_mode(to_string(ThetaMode::kGeometric)) == ThetaMode::kGeometric);
  CHECK_THROWS_AS(parse_theta_mode("cubic"), InvalidArgument);
}
