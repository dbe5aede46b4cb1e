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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rollout/ingest.hpp"
#include "rollout/schedules.hpp"

namespace rollout {

enum class Method { kIlp, kCand, kIrf };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

// Everything one rollout run needs. Parsed from a flat `key = value` file;
// see README.md for the key list.
struct RunConfig {
  // Data source: relevance files when `files` is set, otherwise a synthetic
  // uniform instance.
  std::optional<BundlePaths> files;
  std::size_t synthetic_customers = 100;
  std::size_t synthetic_items = 20;
  std::uint64_t data_seed = 0;
  // Synthetic producers: items split into this many contiguous groups.
  std::optional<std::size_t> synthetic_producers;
  // Group items by id prefix (any data source) when no map file is given.
  std::optional<std::size_t> producer_prefix_len;

  // Replay this `time,customer_id` trace instead of sampling one.
  std::optional<std::filesystem::path> trace_file;

  std::size_t k = 10;
  int eta = 10;
  Method method = Method::kIlp;
  TargetMode targets = TargetMode::kEstimated;
  ThetaMode theta = ThetaMode::kLinear;
  bool prefilter = false;
  bool producer_level = false;
  std::uint64_t seed = 0;

  std::optional<std::filesystem::path> output_dir;
  bool trace_solves = false;
  // Report-only threshold for the per-step exposure change.
  double epsilon = 0.1;

  // Checks the constraints that do not need the data (k, eta, method
  // combinations). Throws InvalidArgument.
  void validate() const;

  // Short tag such as "ilp-EL", "ilp-PG(PF)", "cand".
  std::string label() const;
};

RunConfig parse_config(std::string_view text,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Applies one `key`/`value` setting. Relative paths resolve against
// base_dir. Throws InvalidArgument on unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key,
                   std::string_view value,
                   const std::filesystem::path& base_dir = {});

}  // namespace rollout
