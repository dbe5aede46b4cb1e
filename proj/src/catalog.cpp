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

#include "rollout/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <unordered_set>

#include "rollout/errors.hpp"

namespace rollout {

namespace {

std::string make_id(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%04zu", prefix, i);
  return buf;
}

void check_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw InvalidArgument(std::string("duplicate ") + what + " id '" + id +
                            "'");
    }
  }
}

void check_scores(const ScoreMatrix& m, const char* which) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (!std::isfinite(v)) {
        throw InvalidArgument(std::string(which) + " score at (" +
                              std::to_string(r) + ", " + std::to_string(c) +
                              ") is not finite");
      }
      if (v < 0.0) {
        throw InvalidArgument(std::string(which) + " score at (" +
                              std::to_string(r) + ", " + std::to_string(c) +
                              ") is negative");
      }
    }
  }
}

}  // namespace

void ProducerMap::validate(std::size_t num_items) const {
  if (producer_of.size() != num_items) {
    throw InvalidArgument("producer map covers " +
                          std::to_string(producer_of.size()) + " items, " +
                          "catalog has " + std::to_string(num_items));
  }
  std::vector<bool> used(producer_ids.size(), false);
  for (ProducerIndex p : producer_of) {
    if (p >= producer_ids.size()) {
      throw InvalidArgument("producer index out of range");
    }
    used[p] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw InvalidArgument("producer map lists a producer without items");
  }
  check_unique(producer_ids, "producer");
}

void Catalog::validate() const {
  check_unique(customers, "customer");
  check_unique(items, "item");
  if (producers) producers->validate(items.size());
}

ScoreMatrix::ScoreMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

ScoreMatrix::ScoreMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw InvalidArgument("score matrix expects " +
                          std::to_string(rows * cols) + " values, got " +
                          std::to_string(values_.size()));
  }
}

void RelevancePair::validate() const {
  if (old_scores.rows() != new_scores.rows() ||
      old_scores.cols() != new_scores.cols()) {
    throw InvalidArgument("old and new relevance shapes differ");
  }
  check_scores(old_scores, "old");
  check_scores(new_scores, "new");
}

void RelevancePair::validate(const Catalog& catalog) const {
  validate();
  if (new_scores.rows() != catalog.num_customers() ||
      new_scores.cols() != catalog.num_items()) {
    throw InvalidArgument("relevance shape does not match catalog");
  }
}

Recommendation::Recommendation(CustomerIndex customer,
                               std::vector<ItemIndex> items)
    : customer(customer), items(std::move(items)) {
  std::sort(this->items.begin(), this->items.end());
}

void Recommendation::validate(std::size_t num_items) const {
  if (items.empty()) throw InvalidArgument("recommendation has no items");
  if (!std::is_sorted(items.begin(), items.end())) {
    throw InvalidArgument("recommendation items are not sorted");
  }
  if (std::adjacent_find(items.begin(), items.end()) != items.end()) {
    throw InvalidArgument("recommendation repeats an item");
  }
  if (items.back() >= num_items) {
    throw InvalidArgument("recommended item " + std::to_string(items.back()) +
                          " is outside the catalog");
  }
}

std::vector<ItemIndex> top_k(std::span<const double> scores, std::size_t k) {
  if (k > scores.size()) {
    throw InvalidArgument("top_k: k=" + std::to_string(k) + " exceeds " +
                          std::to_string(scores.size()) + " items");
  }
  std::vector<ItemIndex> order(scores.size());
  std::iota(order.begin(), order.end(), ItemIndex{0});
  auto better = [&](ItemIndex a, ItemIndex b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(k),
                    order.end(), better);
  order.resize(k);
  return order;
}

// Sums in ascending item order so that equal sets give bit-equal utilities.
double utility(std::span<const ItemIndex> items,
               std::span<const double> scores) {
  if (!std::is_sorted(items.begin(), items.end())) {
    std::vector<ItemIndex> ordered(items.begin(), items.end());
    std::sort(ordered.begin(), ordered.end());
    return utility(ordered, scores);
  }
  double total = 0.0;
  for (ItemIndex s : items) total += scores[s];
  return total;
}

double utility(const Recommendation& rec, std::span<const double> scores) {
  return utility(rec.items, scores);
}

double max_utility(std::span<const double> scores, std::size_t k) {
  auto best = top_k(scores, k);
  std::sort(best.begin(), best.end());
  return utility(best, scores);
}

double normalized_utility(std::span<const ItemIndex> items,
                          std::span<const double> scores, std::size_t k) {
  const double best = max_utility(scores, k);
  if (best < 0.0) {
    throw DegenerateCustomer("maximum utility is negative");
  }
  if (best == 0.0) return 1.0;
  return utility(items, scores) / best;
}

double normalized_utility(const Recommendation& rec,
                          std::span<const double> scores, std::size_t k) {
  return normalized_utility(rec.items, scores, k);
}

RelevancePair rating_distance_scores(std::span<const double> ratings,
                                     const ScoreMatrix& distances) {
  if (distances.cols() != ratings.size()) {
    throw InvalidArgument("distance matrix has " +
                          std::to_string(distances.cols()) +
                          " columns for " + std::to_string(ratings.size()) +
                          " rated items");
  }
  RelevancePair pair{ScoreMatrix(distances.rows(), distances.cols()),
                     ScoreMatrix(distances.rows(), distances.cols())};
  for (std::size_t u = 0; u < distances.rows(); ++u) {
    for (std::size_t s = 0; s < distances.cols(); ++s) {
      const double d = distances(u, s);
      if (!(d > 0.0)) {
        throw InvalidArgument("distance must be positive");
      }
      pair.old_scores(u, s) = ratings[s];
      pair.new_scores(u, s) = ratings[s] / d;
    }
  }
  return pair;
}

SyntheticData synthetic_pair(std::size_t num_customers, std::size_t num_items,
                             std::uint64_t seed) {
  if (num_customers == 0 || num_items == 0) {
    throw InvalidArgument("synthetic_pair needs at least one customer and item");
  }
  SyntheticData data;
  data.catalog.customers.reserve(num_customers);
  for (std::size_t u = 0; u < num_customers; ++u) {
    data.catalog.customers.push_back(make_id('u', u));
  }
  data.catalog.items.reserve(num_items);
  for (std::size_t s = 0; s < num_items; ++s) {
    data.catalog.items.push_back(make_id('s', s));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  // generate_canonical can round up to 1.0; keep the range half-open.
  auto unit = [&dist](std::mt19937_64& g) {
    return std::min(dist(g), std::nextafter(1.0, 0.0));
  };
  data.relevance.old_scores = ScoreMatrix(num_customers, num_items);
  data.relevance.new_scores = ScoreMatrix(num_customers, num_items);
  for (std::size_t u = 0; u < num_customers; ++u) {
    for (std::size_t s = 0; s < num_items; ++s) {
      data.relevance.old_scores(u, s) = unit(rng);
    }
  }
  for (std::size_t u = 0; u < num_customers; ++u) {
    for (std::size_t s = 0; s < num_items; ++s) {
      data.relevance.new_scores(u, s) = unit(rng);
    }
  }
  return data;
}

}  // namespace rollout
