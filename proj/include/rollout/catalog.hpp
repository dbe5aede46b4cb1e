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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rollout {

using CustomerIndex = std::size_t;
using ItemIndex = std::size_t;
using ProducerIndex = std::size_t;

// Partition of the item set into producers. producer_of[s] indexes
// producer_ids.
struct ProducerMap {
  std::vector<ProducerIndex> producer_of;
  std::vector<std::string> producer_ids;

  std::size_t num_producers() const { return producer_ids.size(); }
  // Throws InvalidArgument unless every item maps to a valid producer and
  // every producer owns at least one item.
  void validate(std::size_t num_items) const;
};

// Customers and items of one run. Indices into these vectors are the
// internal ids used everywhere else and are stable for the whole run.
struct Catalog {
  std::vector<std::string> customers;
  std::vector<std::string> items;
  std::optional<ProducerMap> producers;

  std::size_t num_customers() const { return customers.size(); }
  std::size_t num_items() const { return items.size(); }
  void validate() const;
};

// Dense row-major customers x items matrix of relevance scores.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {values_.data() + r * cols_, cols_};
  }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Old and new relevance models over the same customers x items grid.
struct RelevancePair {
  ScoreMatrix old_scores;
  ScoreMatrix new_scores;

  std::size_t num_customers() const { return new_scores.rows(); }
  std::size_t num_items() const { return new_scores.cols(); }

  // Shapes must agree and every score must be finite and non-negative.
  void validate() const;
  void validate(const Catalog& catalog) const;
};

// A slate of exactly k distinct items shown to one customer. Items are kept
// sorted ascending so that set equality is vector equality.
struct Recommendation {
  CustomerIndex customer = 0;
  std::vector<ItemIndex> items;

  Recommendation() = default;
  Recommendation(CustomerIndex customer, std::vector<ItemIndex> items);

  std::size_t k() const { return items.size(); }
  // Throws InvalidArgument on duplicates, empty slates or items >= num_items.
  void validate(std::size_t num_items) const;

  friend bool operator==(const Recommendation&,
                         const Recommendation&) = default;
};

// The k highest-scoring items, best first. Ties go to the lower index.
std::vector<ItemIndex> top_k(std::span<const double> scores, std::size_t k);

// Sum of scores over the given items, accumulated in the order given.
double utility(std::span<const ItemIndex> items, std::span<const double> scores);
double utility(const Recommendation& rec, std::span<const double> scores);

// Utility of the customer's own top-k slate (items summed in ascending
// index order, the same order Recommendation uses).
double max_utility(std::span<const double> scores, std::size_t k);

// utility(rec) / max_utility. A customer with max utility exactly 0 is
// satisfied by anything and gets 1; a negative maximum throws
// DegenerateCustomer.
double normalized_utility(const Recommendation& rec,
                          std::span<const double> scores, std::size_t k);
double normalized_utility(std::span<const ItemIndex> items,
                          std::span<const double> scores, std::size_t k);

// Ratings-only old model against a rating / distance new model.
// distances is customers x items and must be strictly positive.
RelevancePair rating_distance_scores(std::span<const double> ratings,
                                     const ScoreMatrix& distances);

struct SyntheticData {
  Catalog catalog;
  RelevancePair relevance;
};

// Old and new scores drawn independently from U[0, 1). Deterministic in
// seed. Customer ids are "u0000", ..., item ids "s0000", ....
SyntheticData synthetic_pair(std::size_t num_customers, std::size_t num_items,
                             std::uint64_t seed);

}  // namespace rollout
