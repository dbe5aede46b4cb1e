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

#include <algorithm>
#include <cmath>

#include "rollout/arrivals.hpp"
#include "rollout/errors.hpp"

using namespace rollout;

TEST_CASE("interarrival means") {
  CHECK(sample_mean_interarrivals(0, 1).empty());
  const auto means = sample_mean_interarrivals(100000, 5);
  double sum = 0.0;
  for (double m : means) {
    CHECK(m >= kMinMeanInterarrival);
    CHECK(m <= 2.0);
    sum += m;
  }
  const double mean = sum / static_cast<double>(means.size());
  CHECK(mean >= 0.97);
  CHECK(mean <= 1.03);
}

TEST_CASE("distribution parameters") {
  CHECK(kMeanInterarrival == 1.0);
  CHECK(kInterarrivalVariance == 0.2);
}

TEST_CASE("sample variance matches the truncated normal") {
  // Normal(1, 0.2) truncated symmetrically to [0, 2]: the mean stays 1 and
  // the variance shrinks by 1 - 2 a phi(a) / (2 Phi(a) - 1) with a = 1/sigma.
  const double sigma = std::sqrt(0.2);
  const double a = 1.0 / sigma;
  const double phi = std::exp(-0.5 * a * a) / std::sqrt(2.0 * M_PI);
  const double mass = std::erf(a / std::sqrt(2.0));
  const double expect = 0.2 * (1.0 - 2.0 * a * phi / mass);

  const auto means = sample_mean_interarrivals(200000, 9);
  double sum = 0.0, sq = 0.0;
  for (double m : means) {
    sum += m;
    sq += m * m;
  }
  const double n = static_cast<double>(means.size());
  const double var = sq / n - (sum / n) * (sum / n);
  CHECK(var == doctest::Approx(expect).epsilon(0.03));
}

TEST_CASE("step_of maps periods") {
  CHECK(step_of(-1.0) == 0);
  CHECK(step_of(-0.5) == 0);
  CHECK(step_of(0.0) == 1);
  CHECK(step_of(0.999) == 1);
  CHECK(step_of(9.5) == 10);
}

TEST_CASE("empty and invalid traces") {
  CHECK(generate_trace({}, 10, 1).events.empty());
  const std::vector<double> bad{1.0, 0.0};
  CHECK_THROWS_AS(generate_trace(bad, 10, 1), InvalidArgument);
  const std::vector<double> ok{1.0};
  CHECK_THROWS_AS(generate_trace(ok, 0, 1), InvalidArgument);
}

TEST_CASE("traces are sorted, bounded and deterministic") {
  const auto means = sample_mean_interarrivals(50, 3);
  const auto a = generate_trace(means, 10, 4);
  const auto b = generate_trace(means, 10, 4);
  CHECK(a == b);
  CHECK_NOTHROW(a.validate());
  CHECK(std::is_sorted(a.events.begin(), a.events.end(),
                       [](const Arrival& x, const Arrival& y) { return x.time < y.time; }));
  for (const auto& e : a.events) {
    CHECK(e.time >= -1.0);
    CHECK(e.time < 10.0);
  }
  const auto c = generate_trace(means, 10, 5);
  CHECK_FALSE(a == c);
}

TEST_CASE("step slices partition the trace") {
  const auto means = sample_mean_interarrivals(30, 6);
  const auto trace = generate_trace(means, 5, 7);
  std::size_t total = 0;
  for (int i = 0; i <= 5; ++i) {
    for (const auto& e : trace.step(i)) CHECK(step_of(e.time) == i);
    total += trace.step(i).size();
  }
  CHECK(total == trace.events.size());
  CHECK(trace.warmup().data() == trace.step(0).data());
}

TEST_CASE("Poisson count for one customer") {
  // mu = 1 over a window of 11 periods: mean count 11, variance 11.
  const std::vector<double> means{1.0};
  const int seeds = 1000;
  double total = 0.0;
  for (int s = 0; s < seeds; ++s) total += static_cast<double>(generate_trace(means, 10, s).events.size());
  const double mean = total / seeds;
  const double three_sigma = 3.0 * std::sqrt(11.0 / seeds);
  CHECK(std::fabs(mean - 11.0) <= three_sigma);
}

TEST_CASE("per-window rate converges to window length over mu") {
  const std::vector<double> means{0.5};
  const int seeds = 1000;
  double in_window = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const auto trace = generate_trace(means, 4, 100 + s);
    for (const auto& e : trace.events) {
      if (e.time >= 1.0 && e.time < 2.5) in_window += 1.0;
    }
  }
  const double expect = 1.5 / 0.5;
  const double three_sigma = 3.0 * std::sqrt(expect / seeds);
  CHECK(std::fabs(in_window / seeds - expect) <= three_sigma);
}

TEST_CASE("trace validation") {
  ArrivalTrace t;
  t.eta = 2;
  t.events = {{0.5, 0}, {0.1, 1}};
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
  t.events = {{-1.5, 0}};
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
  t.events = {{2.0, 0}};
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
}
