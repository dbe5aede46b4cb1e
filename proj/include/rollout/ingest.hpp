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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rollout/arrivals.hpp"
#include "rollout/catalog.hpp"

namespace rollout {

// Relevance files come either as `customer_id,item_id,score` triples, where
// absent pairs score 0, or as a dense matrix whose header row is
// `customer_id,<item ids...>`. Every file is comma-delimited UTF-8 with a
// header row.
enum class MatrixFormat { kTriples, kDense };

std::string_view to_string(MatrixFormat format);
MatrixFormat parse_matrix_format(std::string_view text);

struct BundlePaths {
  std::filesystem::path old_scores;
  std::filesystem::path new_scores;
  MatrixFormat format = MatrixFormat::kTriples;
  // `item_id,producer_id`; takes precedence over producer_prefix_len.
  std::optional<std::filesystem::path> producer_map;
  std::optional<std::size_t> producer_prefix_len;
};

struct FileProvenance {
  std::string path;
  std::string sha256;
};

// Fraction of missing pairs above which loading emits a warning.
inline constexpr double kMissingWarnFraction = 0.5;

struct DatasetBundle {
  Catalog catalog;
  RelevancePair relevance;
  std::vector<FileProvenance> provenance;
  std::size_t missing_old = 0;
  std::size_t missing_new = 0;
  std::vector<std::string> warnings;
};

// Loads and cross-validates a bundle. Customer and item ids are ordered
// lexicographically, so row order in the files does not matter. Throws
// LoadError on parse errors, mismatched id sets or negative scores.
DatasetBundle load_bundle(const BundlePaths& paths);

// Groups items by the first prefix_len characters of their ids. Producers
// are ordered by prefix.
ProducerMap derive_producer_map_by_prefix(std::span<const std::string> item_ids,
                                          std::size_t prefix_len);

ProducerMap load_producer_map(const std::filesystem::path& path,
                              const Catalog& catalog);

void write_scores(const std::filesystem::path& path, MatrixFormat format,
                  const Catalog& catalog, const ScoreMatrix& scores);
void write_producer_map(const std::filesystem::path& path,
                        const Catalog& catalog);

// `time,customer_id` rows. Times use the shortest round-trip decimal form,
// so a replayed trace is bit-identical to the exported one.
void write_trace(const std::filesystem::path& path, const ArrivalTrace& trace,
                 const Catalog& catalog);
ArrivalTrace read_trace(const std::filesystem::path& path,
                        const Catalog& catalog, int eta);

// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path& path);

// Shortest decimal string that parses back to exactly x.
std::string format_double(double x);

}  // namespace rollout
