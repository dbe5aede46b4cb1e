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

#include <fstream>
#include <sstream>

#include "rollout/baselines.hpp"
#include "rollout/errors.hpp"
#include "rollout/report.hpp"
#include "rollout/runner.hpp"
#include "test_util.hpp"

using namespace rollout;

namespace {

RunConfig small_config(Method method = Method::kIlp) {
  RunConfig c;
  c.synthetic_customers = 40;
  c.synthetic_items = 12;
  c.data_seed = 3;
  c.k = 4;
  c.eta = 5;
  c.method = method;
  c.seed = 9;
  return c;
}

// Every customer logs in once per period, in index order.
ArrivalTrace round_robin(std::size_t customers, int eta) {
  ArrivalTrace t;
  t.eta = eta;
  for (int period = -1; period < eta; ++period) {
    for (std::size_t u = 0; u < customers; ++u) {
      t.events.push_back({period + (u + 0.5) / static_cast<double>(customers), u});
    }
  }
  return t;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("a single step gives unit path length") {
  RunConfig c = small_config();
  c.eta = 1;
  const auto r = run(c);
  REQUIRE(r.metrics.upsilon.has_value());
  CHECK(*r.metrics.upsilon == 1.0);
  CHECK(*r.metrics.pi == 1.0);
  CHECK(*r.metrics.z == 0.0);
  CHECK(r.observed.size() == 1);
}

TEST_CASE("runs are deterministic and conserve exposure") {
  for (auto method : {Method::kIlp, Method::kCand, Method::kIrf}) {
    const RunConfig c = small_config(method);
    const auto a = run(c);
    const auto b = run(c);
    CHECK(report_json(a) == report_json(b));
    CHECK(a.observed.size() == static_cast<std::size_t>(c.eta));
    CHECK(a.exposure_by_step.size() == static_cast<std::size_t>(c.eta) + 1);
    for (std::size_t i = 0; i < a.exposure_by_step.size(); ++i) {
      double total = 0.0;
      for (double e : a.exposure_by_step[i]) total += e;
      CHECK(total == doctest::Approx(static_cast<double>(a.arrivals_per_step[i])).epsilon(1e-12));
    }
    CHECK(*a.metrics.upsilon >= 1.0 - 1e-12);
  }
}

TEST_CASE("ILP arrivals respect the step floor") {
  for (auto targets : {TargetMode::kEstimated, TargetMode::kPreserving}) {
    for (auto theta : {ThetaMode::kLinear, ThetaMode::kGeometric}) {
      RunConfig c = small_config();
      c.targets = targets;
      c.theta = theta;
      const auto r = run(c);
      for (const auto& e : r.log) {
        CHECK(e.utility_norm >= r.theta[e.step - 1] - 1e-9);
        CHECK(e.objective.has_value());
      }
    }
  }
}

TEST_CASE("canary utility rises step by step") {
  const std::size_t n = 6;
  const int eta = 6;
  RunConfig c = small_config(Method::kCand);
  c.synthetic_customers = n;
  c.eta = eta;
  const Dataset data = load_dataset(c);
  const auto trace = round_robin(n, eta);
  const auto r = run(c, data, trace);

  // Replay oracle: the canary cohorts come from the run's own log, since a
  // customer served new-model top-k has normalized utility exactly one.
  std::vector<int> switched_at(n, eta + 1);
  for (const auto& e : r.log) {
    const auto new_top = rollout::testing::sorted(top_k(data.relevance.new_scores.row(e.customer), c.k));
    const auto old_top = rollout::testing::sorted(top_k(data.relevance.old_scores.row(e.customer), c.k));
    if (e.items == new_top && new_top != old_top) {
      switched_at[e.customer] = std::min(switched_at[e.customer], e.step);
    }
  }
  std::vector<std::size_t> cohort(eta + 2, 0);
  for (std::size_t u = 0; u < n; ++u) ++cohort[std::min(switched_at[u], eta + 1)];
  for (const auto& e : r.log) {
    if (e.step >= switched_at[e.customer]) {
      CHECK(e.items == rollout::testing::sorted(top_k(data.relevance.new_scores.row(e.customer), c.k)));
    }
  }
  // One customer per cohort, unless a customer's two top-k sets coincide.
  for (int step = 1; step <= eta; ++step) CHECK(cohort[step] <= 1);

  double previous = -1.0;
  for (int step = 1; step <= eta; ++step) {
    double oracle = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      const auto& model = step >= switched_at[u] ? data.relevance.new_scores
                                                 : data.relevance.old_scores;
      oracle += normalized_utility(Recommendation(u, top_k(model.row(u), c.k)),
                                   data.relevance.new_scores.row(u), c.k);
    }
    oracle /= static_cast<double>(n);
    const double mean = r.metrics.utility[step - 1]->mean;
    CHECK(mean == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(mean >= previous);
    previous = mean;
  }
  CHECK(previous == doctest::Approx(1.0));
}

TEST_CASE("empty windows are flagged") {
  RunConfig c = small_config();
  c.eta = 3;
  const Dataset data = load_dataset(c);

  ArrivalTrace no_warmup;
  no_warmup.eta = 3;
  no_warmup.events = {{0.5, 0}, {1.5, 1}, {2.5, 2}};
  auto r = run(c, data, no_warmup);
  CHECK(r.empty_warmup);
  CHECK(r.degenerate);
  CHECK_FALSE(r.metrics.upsilon.has_value());
  CHECK(r.observed.empty());

  ArrivalTrace gap;
  gap.eta = 3;
  gap.events = {{-0.5, 0}, {-0.2, 1}, {0.5, 2}, {2.5, 3}};
  r = run(c, data, gap);
  CHECK(r.degenerate);
  CHECK(r.empty_steps == std::vector<int>{2});
  CHECK(r.series.step_ec[1] == 0.0);
  CHECK(r.observed[1] == r.observed[0]);
  CHECK_FALSE(r.metrics.utility[1].has_value());
}

TEST_CASE("run argument checks") {
  RunConfig c = small_config();
  c.producer_level = true;
  CHECK_THROWS_AS(run(c), InvalidArgument);
  c.synthetic_producers = 3;
  CHECK_NOTHROW(run(c));
  c.synthetic_producers = 13;
  CHECK_THROWS_AS(run(c), InvalidArgument);

  RunConfig big_k = small_config();
  big_k.k = 13;
  CHECK_THROWS_AS(run(big_k), InvalidArgument);

  const RunConfig base = small_config();
  const Dataset data = load_dataset(base);
  auto trace = make_trace(base, data);
  trace.eta = 4;
  CHECK_THROWS_AS(run(base, data, trace), InvalidArgument);
}

TEST_CASE("replaying an exported trace reproduces the run") {
  const auto dir = rollout::testing::scratch_dir("runner_replay");
  RunConfig c = small_config();
  c.prefilter = true;
  c.synthetic_customers = 30;
  c.synthetic_items = 40;
  const Dataset data = load_dataset(c);
  const auto trace = make_trace(c, data);
  write_trace(dir / "trace.csv", trace, data.catalog);

  RunConfig replay = c;
  replay.trace_file = dir / "trace.csv";
  auto a = run(c);
  auto b = run(replay);
  b.config.trace_file.reset();
  CHECK(report_json(a) == report_json(b));
}

TEST_CASE("immediate impact") {
  RunConfig c = small_config();
  Dataset data = load_dataset(c);
  const auto trace = make_trace(c, data);

  Dataset same = data;
  same.relevance.new_scores = same.relevance.old_scores;
  auto imp = immediate_impact(same, trace, c.k);
  CHECK(imp.ec == 0.0);
  CHECK(imp.histogram.below_50 == 1.0);

  // Old model prefers the first half of the items, new the second half.
  Dataset split = data;
  for (std::size_t u = 0; u < 40; ++u) {
    for (std::size_t s = 0; s < 12; ++s) {
      split.relevance.old_scores(u, s) = s < 6 ? 1.0 + 0.01 * s : 0.0;
      split.relevance.new_scores(u, s) = s < 6 ? 0.0 : 1.0 + 0.01 * s;
    }
  }
  imp = immediate_impact(split, trace, c.k);
  CHECK(imp.ec == doctest::Approx(2.0).epsilon(1e-12));
  // Old serves items 2-5 and new serves 8-11; the other four stay at zero.
  CHECK(imp.histogram.above_100 == doctest::Approx(8.0 / 12.0));
  CHECK(imp.histogram.below_50 == doctest::Approx(4.0 / 12.0));
}

TEST_CASE("impact histogram matches a per-item recompute on synthetic data") {
  RunConfig c;
  c.synthetic_customers = 100;
  c.synthetic_items = 20;
  c.data_seed = 7;
  const auto imp = immediate_impact(c);
  const auto data = load_dataset(c);
  const auto trace = make_trace(c, data);
  std::vector<double> old_e(20, 0.0), new_e(20, 0.0);
  for (const auto& a : trace.events) {
    for (auto s : rollout::testing::sort_then_take(
             std::vector<double>(data.relevance.old_scores.row(a.customer).begin(),
                                 data.relevance.old_scores.row(a.customer).end()),
             10)) {
      old_e[s] += 1.0;
    }
    for (auto s : rollout::testing::sort_then_take(
             std::vector<double>(data.relevance.new_scores.row(a.customer).begin(),
                                 data.relevance.new_scores.row(a.customer).end()),
             10)) {
      new_e[s] += 1.0;
    }
  }
  const double total = 10.0 * static_cast<double>(trace.events.size());
  std::size_t buckets[3] = {0, 0, 0};
  double ec = 0.0;
  for (std::size_t s = 0; s < 20; ++s) {
    const double o = old_e[s] / total, n = new_e[s] / total;
    ec += std::fabs(o - n);
    const double pct = o == 0.0 ? (n > 0.0 ? INFINITY : 0.0) : 100.0 * std::fabs(n - o) / o;
    ++buckets[pct < 50.0 ? 0 : pct < 100.0 ? 1 : 2];
  }
  CHECK(imp.ec == doctest::Approx(ec).epsilon(1e-12));
  CHECK(imp.histogram.below_50 == buckets[0] / 20.0);
  CHECK(imp.histogram.from_50_to_100 == buckets[1] / 20.0);
  CHECK(imp.histogram.above_100 == buckets[2] / 20.0);
}

TEST_CASE("sweeps do not depend on the thread count") {
  const RunConfig c = small_config();
  const std::vector<int> etas{1, 3};
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto one = sweep(c, etas, seeds, 1);
  const auto many = sweep(c, etas, seeds, 4);
  CHECK(sweep_json(one) == sweep_json(many));
  REQUIRE(one.summary.size() == 2);
  CHECK(one.summary[0].runs == 3);
  CHECK(*one.summary[0].mean_pi == 1.0);
  RunConfig single = c;
  single.eta = 3;
  single.seed = 2;
  CHECK(*one.points[4].pi == *run(single).metrics.pi);
}

TEST_CASE("output files") {
  const auto dir = rollout::testing::scratch_dir("runner_outputs");
  RunConfig c = small_config();
  c.trace_solves = true;
  const auto r = run(c);
  write_outputs(r, dir);
  for (const char* f : {"report.json", "step_ec.csv", "utility.csv", "exposure_by_step.csv",
                        "solves.csv"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  CHECK(slurp(dir / "step_ec.csv").rfind("step,ec\n1,", 0) == 0);
  CHECK(slurp(dir / "exposure_by_step.csv").rfind("step,item_id,exposure\n0,s0000,", 0) == 0);
  CHECK(slurp(dir / "solves.csv").rfind("time,customer,step,objective,utility_norm,item_1,", 0) == 0);
  CHECK(slurp(dir / "report.json") == report_json(r));
  const auto json = slurp(dir / "report.json");
  CHECK(json.find("\"upsilon\"") != std::string::npos);
  CHECK(json.find("\"utility\"") != std::string::npos);
}
