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

#include "rollout/runner.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <memory>
#include <random>
#include <thread>

#include "rollout/baselines.hpp"
#include "rollout/errors.hpp"
#include "rollout/schedules.hpp"
#include "rollout/solver.hpp"

namespace rollout {

namespace {

enum SeedStream : std::uint32_t {
  kMeansStream = 1,
  kTraceStream = 2,
  kCanaryStream = 3,
};

std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

ProducerMap contiguous_producers(std::size_t num_items, std::size_t groups) {
  if (groups > num_items) {
    throw InvalidArgument("more synthetic producers than items");
  }
  ProducerMap map;
  for (std::size_t p = 0; p < groups; ++p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "p%04zu", p);
    map.producer_ids.emplace_back(buf);
  }
  for (std::size_t s = 0; s < num_items; ++s) {
    map.producer_of.push_back(s * groups / num_items);
  }
  return map;
}

Distribution serve_all(const ScoreMatrix& scores, std::span<const Arrival> events,
                       std::size_t k) {
  ExposureLedger ledger(scores.cols(), k);
  for (const Arrival& a : events) {
    ledger.record(Recommendation(a.customer, top_k(scores.row(a.customer), k)));
  }
  return ledger.distribution();
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

Dataset load_dataset(const RunConfig& config) {
  config.validate();
  Dataset data;
  if (config.files) {
    BundlePaths paths = *config.files;
    if (!paths.producer_map && config.producer_prefix_len) {
      paths.producer_prefix_len = config.producer_prefix_len;
    }
    DatasetBundle bundle = load_bundle(paths);
    data.catalog = std::move(bundle.catalog);
    data.relevance = std::move(bundle.relevance);
    data.provenance = std::move(bundle.provenance);
    data.warnings = std::move(bundle.warnings);
  } else {
    SyntheticData synth = synthetic_pair(config.synthetic_customers,
                                         config.synthetic_items, config.data_seed);
    data.catalog = std::move(synth.catalog);
    data.relevance = std::move(synth.relevance);
    if (config.synthetic_producers) {
      data.catalog.producers =
          contiguous_producers(data.catalog.num_items(), *config.synthetic_producers);
    } else if (config.producer_prefix_len) {
      data.catalog.producers =
          derive_producer_map_by_prefix(data.catalog.items, *config.producer_prefix_len);
    }
  }
  data.catalog.validate();
  data.relevance.validate(data.catalog);
  return data;
}

ArrivalTrace make_trace(const RunConfig& config, const Dataset& data) {
  if (config.trace_file) return read_trace(*config.trace_file, data.catalog, config.eta);
  const auto means = sample_mean_interarrivals(data.catalog.num_customers(),
                                               derive_seed(config.seed, kMeansStream));
  return generate_trace(means, config.eta, derive_seed(config.seed, kTraceStream));
}

ImpactResult immediate_impact(const Dataset& data, const ArrivalTrace& trace,
                              std::size_t k) {
  ImpactResult result;
  result.old_dist = serve_all(data.relevance.old_scores, trace.events, k);
  result.new_dist = serve_all(data.relevance.new_scores, trace.events, k);
  result.ec = exposure_change(result.old_dist, result.new_dist);
  result.histogram = impact_histogram(result.old_dist, result.new_dist);
  return result;
}

ImpactResult immediate_impact(const RunConfig& config) {
  const Dataset data = load_dataset(config);
  if (config.k > data.catalog.num_items()) {
    throw InvalidArgument("k exceeds the number of items");
  }
  const ArrivalTrace trace = make_trace(config, data);
  if (trace.events.empty()) throw EmptyWindow("trace has no arrivals");
  return immediate_impact(data, trace, config.k);
}

RunReport run(const RunConfig& config, const Dataset& data,
              const ArrivalTrace& trace) {
  config.validate();
  const std::size_t n = data.catalog.num_items();
  const std::size_t k = config.k;
  const int eta = config.eta;
  if (k > n) throw InvalidArgument("k exceeds the number of items");
  if (trace.eta != eta) throw InvalidArgument("trace eta differs from config eta");
  if (config.producer_level && !data.catalog.producers) {
    throw InvalidArgument("producer_level needs a producer map");
  }
  const RelevancePair& pair = data.relevance;

  RunReport report;
  report.config = config;
  report.num_customers = data.catalog.num_customers();
  report.num_items = n;
  if (data.catalog.producers) report.num_producers = data.catalog.producers->num_producers();
  report.customer_ids = data.catalog.customers;
  report.item_ids = data.catalog.items;
  report.provenance = data.provenance;
  report.warnings = data.warnings;
  report.theta = theta_schedule(config.theta, eta);

  const auto warmup = trace.warmup();
  ExposureLedger warm_ledger(n, k, -1.0, 0.0);
  for (const Arrival& a : warmup) {
    warm_ledger.record(Recommendation(a.customer, top_k(pair.old_scores.row(a.customer), k)));
  }
  report.arrivals_per_step.push_back(warm_ledger.arrivals_seen());
  report.exposure_by_step.push_back(warm_ledger.exposures());
  if (warmup.empty()) {
    report.empty_warmup = true;
    report.degenerate = true;
    return report;
  }
  report.d0 = warm_ledger.distribution();
  report.dpred = predict_final_distribution(pair.new_scores, warmup, k);

  std::optional<RolloutPlan> plan;
  std::shared_ptr<const ProducerMap> producers;
  if (config.method == Method::kIlp) {
    plan = config.targets == TargetMode::kEstimated
               ? RolloutPlan::estimated(eta, config.theta, report.d0, *report.dpred)
               : RolloutPlan::preserving(eta, config.theta);
    if (config.producer_level) {
      producers = std::make_shared<const ProducerMap>(*data.catalog.producers);
    }
  }
  std::optional<CanaryAssignment> canary;
  if (config.method == Method::kCand) {
    canary = cand_assign(data.catalog.num_customers(), eta,
                         derive_seed(config.seed, kCanaryStream));
  }

  Distribution previous = report.d0;
  for (int step = 1; step <= eta; ++step) {
    if (plan && plan->target_mode() == TargetMode::kPreserving) {
      plan->set_target(step, preserving_target(previous));
    }
    ExposureLedger ledger(n, k, step - 1.0, static_cast<double>(step));
    std::vector<double> utilities;
    const auto events = trace.step(step);
    utilities.reserve(events.size());

    for (const Arrival& a : events) {
      const CustomerIndex u = a.customer;
      ArrivalLog entry{a.time, u, step, std::nullopt, 0.0, {}};
      Recommendation rec;
      switch (config.method) {
        case Method::kIlp: {
          SelectionInstance inst =
              build_instance(ledger, *plan, step, u, pair, k, producers);
          if (config.prefilter) inst = prefilter(inst);
          if (config.producer_level) {
            rec = solve_producer_level(inst);
            entry.objective = producer_objective(inst, rec.items);
          } else {
            rec = solve_exact(inst);
            entry.objective = objective(inst, rec.items);
          }
          break;
        }
        case Method::kCand:
          rec = cand_recommend(u, step, *canary, pair, k);
          break;
        case Method::kIrf:
          rec = Recommendation(u, top_k(irf_row(pair, u, step, eta), k));
          break;
      }
      ledger.record(rec);
      entry.utility_norm = normalized_utility(rec, pair.new_scores.row(u), k);
      entry.items = rec.items;
      utilities.push_back(entry.utility_norm);
      report.log.push_back(std::move(entry));
    }

    report.arrivals_per_step.push_back(ledger.arrivals_seen());
    report.exposure_by_step.push_back(ledger.exposures());
    if (events.empty()) {
      report.empty_steps.push_back(step);
      report.observed.push_back(previous);
    } else {
      report.observed.push_back(ledger.distribution());
    }
    report.series.step_ec.push_back(exposure_change(previous, report.observed.back()));
    report.series.utility.push_back(std::move(utilities));
    previous = report.observed.back();
  }

  report.degenerate = !report.empty_steps.empty();
  report.series.ec_immediate = exposure_change(report.d0, report.observed.back());
  report.metrics = compute_metrics(report.series);
  report.impact = immediate_impact(data, trace, k);
  return report;
}

RunReport run(const RunConfig& config) {
  const Dataset data = load_dataset(config);
  const ArrivalTrace trace = make_trace(config, data);
  return run(config, data, trace);
}

SweepResult sweep(const RunConfig& base, std::span<const int> etas,
                  std::span<const std::uint64_t> seeds, unsigned threads) {
  if (etas.empty() || seeds.empty()) {
    throw InvalidArgument("sweep needs at least one eta and one seed");
  }
  const Dataset data = load_dataset(base);

  SweepResult result;
  for (int eta : etas) {
    for (std::uint64_t seed : seeds) result.points.push_back({eta, seed, {}, {}, {}, 0.0});
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    while (!failed) {
      const std::size_t j = next++;
      if (j >= result.points.size()) return;
      SweepPoint& point = result.points[j];
      try {
        RunConfig cfg = base;
        cfg.eta = point.eta;
        cfg.seed = point.seed;
        const RunReport report = run(cfg, data, make_trace(cfg, data));
        point.upsilon = report.metrics.upsilon;
        point.pi = report.metrics.pi;
        point.z = report.metrics.z;
        point.ec_immediate = report.metrics.ec_immediate;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(result.points.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  for (int eta : etas) {
    SweepSummary summary;
    summary.eta = eta;
    std::vector<double> ups, pis, zs;
    for (const SweepPoint& p : result.points) {
      if (p.eta != eta) continue;
      ++summary.runs;
      if (p.upsilon) ups.push_back(*p.upsilon);
      if (p.pi) pis.push_back(*p.pi);
      if (p.z) zs.push_back(*p.z);
    }
    if (!ups.empty()) summary.mean_upsilon = mean_of(ups);
    if (!pis.empty()) summary.mean_pi = mean_of(pis);
    if (!zs.empty()) summary.mean_z = mean_of(zs);
    result.summary.push_back(summary);
  }
  return result;
}

}  // namespace rollout
