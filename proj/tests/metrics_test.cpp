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

#include "rollout/metrics.hpp"
#include "test_util.hpp"

using namespace rollout;
using rollout::testing::random_distribution;
using rollout::testing::uniform_row;

namespace {

StepSeries series_of(std::vector<double> steps, double direct) {
  StepSeries s;
  s.step_ec = std::move(steps);
  s.ec_immediate = direct;
  return s;
}

}  // namespace

TEST_CASE("single step") {
  const auto s = series_of({0.4}, 0.4);
  CHECK(*path_length(s) == 1.0);
  CHECK(*max_transition_cost(s) == 1.0);
  CHECK(*transition_inequality(s) == 0.0);
}

TEST_CASE("equal straight-line steps") {
  const auto s = series_of(std::vector<double>(10, 0.05), 0.5);
  CHECK(*path_length(s) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(*max_transition_cost(s) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(std::fabs(*transition_inequality(s) - 1.0) <= 1e-12);
}

TEST_CASE("all change in one step") {
  std::vector<double> steps(10, 0.0);
  steps[3] = 0.7;
  const auto s = series_of(steps, 0.7);
  CHECK(*transition_inequality(s) == 0.0);
  CHECK(*max_transition_cost(s) == 1.0);
}

TEST_CASE("undefined metrics") {
  const auto s = series_of({0.0, 0.0}, 0.0);
  CHECK_FALSE(path_length(s).has_value());
  CHECK_FALSE(max_transition_cost(s).has_value());
  CHECK_FALSE(transition_inequality(s).has_value());
  // A path that returns to its start: Z is defined, the ratios are not.
  const auto loop = series_of({0.2, 0.2}, 0.0);
  CHECK_FALSE(path_length(loop).has_value());
  CHECK(*transition_inequality(loop) == doctest::Approx(std::log10(2.0)));
}

TEST_CASE("metric identities on random paths") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const int eta = 1 + static_cast<int>(rng() % 12);
    std::vector<Distribution> path{random_distribution(rng, 6)};
    for (int i = 0; i < eta; ++i) path.push_back(random_distribution(rng, 6));
    StepSeries s;
    for (int i = 1; i <= eta; ++i) s.step_ec.push_back(exposure_change(path[i - 1], path[i]));
    s.ec_immediate = exposure_change(path.front(), path.back());
    const double ups = *path_length(s);
    const double pi = *max_transition_cost(s);
    const double z = *transition_inequality(s);
    CHECK(ups >= 1.0 - 1e-12);
    CHECK(pi <= ups + 1e-12);
    CHECK(pi >= ups / eta - 1e-12);
    CHECK(z >= 0.0);
    CHECK(z <= std::log10(static_cast<double>(eta)) + 1e-12);

    // Two-pass oracle for Z.
    double total = 0.0;
    for (double x : s.step_ec) total += x;
    double entropy = 0.0;
    for (double x : s.step_ec) {
      if (x > 0.0) entropy -= (x / total) * std::log10(x / total);
    }
    CHECK(z == doctest::Approx(entropy).epsilon(1e-12));
  }
}

TEST_CASE("utility statistics") {
  const std::vector<double> ones(5, 1.0);
  auto st = summarize(ones);
  CHECK(st.mean == 1.0);
  CHECK(st.std == 0.0);
  CHECK(st.min == 1.0);
  CHECK(st.count == 5);

  const std::vector<double> pair{0.4, 0.6};
  st = summarize(pair);
  CHECK(st.mean == doctest::Approx(0.5));
  CHECK(st.min == 0.4);
  CHECK(st.std == doctest::Approx(0.1));

  const auto per_step = utility_stats({{0.5}, {}, {0.2, 0.8}});
  REQUIRE(per_step.size() == 3);
  CHECK(per_step[0].has_value());
  CHECK_FALSE(per_step[1].has_value());
  CHECK(per_step[2]->mean == doctest::Approx(0.5));
}

TEST_CASE("utility statistics match a two-pass oracle") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    const auto xs = uniform_row(rng, 1 + rng() % 50);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    const auto st = summarize(xs);
    CHECK(st.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(st.std == doctest::Approx(std::sqrt(var)).epsilon(1e-9));
    CHECK(st.min == *std::min_element(xs.begin(), xs.end()));
  }
}

TEST_CASE("metrics block") {
  StepSeries s = series_of({0.1, 0.3}, 0.35);
  s.utility = {{1.0, 0.5}, {}};
  const auto m = compute_metrics(s);
  CHECK(*m.upsilon == doctest::Approx(0.4 / 0.35));
  CHECK(*m.pi == doctest::Approx(0.3 / 0.35));
  CHECK(m.ec_immediate == 0.35);
  CHECK(m.step_ec == s.step_ec);
  CHECK(m.utility[0]->mean == 0.75);
  CHECK_FALSE(m.utility[1].has_value());
}
