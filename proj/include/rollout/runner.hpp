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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rollout/arrivals.hpp"
#include "rollout/catalog.hpp"
#include "rollout/config.hpp"
#include "rollout/exposure.hpp"
#include "rollout/ingest.hpp"
#include "rollout/metrics.hpp"

namespace rollout {

// Catalog and relevance for a run, whether loaded or synthesized.
struct Dataset {
  Catalog catalog;
  RelevancePair relevance;
  std::vector<FileProvenance> provenance;
  std::vector<std::string> warnings;
};

Dataset load_dataset(const RunConfig& config);

// The arrival trace for a run: the replay file when configured, otherwise
// sampled from config.seed. Independent of the method, so runs that differ
// only in method see the same arrivals.
ArrivalTrace make_trace(const RunConfig& config, const Dataset& data);

struct ArrivalLog {
  double time = 0.0;
  CustomerIndex customer = 0;
  int step = 0;
  std::optional<double> objective;  // ILP runs only
  double utility_norm = 0.0;        // under the new model
  std::vector<ItemIndex> items;
};

struct ImpactResult {
  Distribution old_dist;
  Distribution new_dist;
  double ec = 0.0;
  ImpactHistogram histogram;
};

struct RunReport {
  RunConfig config;
  std::size_t num_customers = 0;
  std::size_t num_items = 0;
  std::optional<std::size_t> num_producers;
  std::vector<std::string> customer_ids;
  std::vector<std::string> item_ids;
  std::vector<FileProvenance> provenance;
  std::vector<std::string> warnings;

  std::vector<double> theta;
  // Index 0 is the warm-up window, index i is step i.
  std::vector<std::uint64_t> arrivals_per_step;
  std::vector<std::vector<double>> exposure_by_step;

  Distribution d0;
  std::optional<Distribution> dpred;
  std::vector<Distribution> observed;  // D^1..D^eta

  bool empty_warmup = false;
  std::vector<int> empty_steps;
  bool degenerate = false;

  StepSeries series;
  MetricsBlock metrics;
  std::optional<ImpactResult> impact;
  std::vector<ArrivalLog> log;
};

// Serves the whole trace once with the old model and once with the new one
// and compares the two exposure distributions.
ImpactResult immediate_impact(const Dataset& data, const ArrivalTrace& trace,
                              std::size_t k);
ImpactResult immediate_impact(const RunConfig& config);

RunReport run(const RunConfig& config, const Dataset& data,
              const ArrivalTrace& trace);
RunReport run(const RunConfig& config);

// Metrics of one (eta, seed) run in a sweep.
struct SweepPoint {
  int eta = 0;
  std::uint64_t seed = 0;
  std::optional<double> upsilon;
  std::optional<double> pi;
  std::optional<double> z;
  double ec_immediate = 0.0;
};

struct SweepSummary {
  int eta = 0;
  std::optional<double> mean_upsilon;
  std::optional<double> mean_pi;
  std::optional<double> mean_z;
  std::size_t runs = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;      // eta-major, then seed order
  std::vector<SweepSummary> summary;   // one per eta
};

// Runs every (eta, seed) pair, up to `threads` at a time (0 = hardware
// concurrency). Results are independent of the thread count.
SweepResult sweep(const RunConfig& base, std::span<const int> etas,
                  std::span<const std::uint64_t> seeds, unsigned threads = 0);

}  // namespace rollout
