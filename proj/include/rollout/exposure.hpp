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
#include <span>
#include <vector>

#include "rollout/catalog.hpp"

namespace rollout {

// Normalized exposure over a universe of items (or producers).
struct Distribution {
  std::vector<double> mass;

  std::size_t size() const { return mass.size(); }
  double operator[](std::size_t s) const { return mass[s]; }

  // Non-negative and summing to one within tol.
  void validate(double tol = 1e-12) const;

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

// Exposure accumulated over one time window. Every recommendation adds 1/k
// to each of its k items, so the total exposure equals the number of
// arrivals. Counts are kept as integer slot tallies; exposure(s) is the
// exact tally divided by k.
class ExposureLedger {
 public:
  ExposureLedger(std::size_t num_items, std::size_t k, double window_start = 0.0,
                 double window_end = 0.0);

  // Throws InvalidArgument if the slate size differs from k or names an item
  // outside the universe.
  void record(const Recommendation& rec);

  std::size_t num_items() const { return slots_.size(); }
  std::size_t k() const { return k_; }
  std::uint64_t arrivals_seen() const { return arrivals_; }
  double window_start() const { return start_; }
  double window_end() const { return end_; }

  std::uint64_t slots(ItemIndex s) const { return slots_[s]; }
  double exposure(ItemIndex s) const {
    return static_cast<double>(slots_[s]) / static_cast<double>(k_);
  }
  std::vector<double> exposures() const;

  // Throws EmptyWindow when nothing has been recorded.
  Distribution distribution() const;

 private:
  std::vector<std::uint64_t> slots_;
  std::size_t k_;
  std::uint64_t arrivals_ = 0;
  double start_;
  double end_;
};

// Sums per-item values into per-producer values.
std::vector<double> aggregate_by_producer(std::span<const double> per_item,
                                          const ProducerMap& producers);
Distribution aggregate_by_producer(const Distribution& per_item,
                                   const ProducerMap& producers);

// L1 distance between two distributions over the same universe; in [0, 2].
double exposure_change(const Distribution& a, const Distribution& b);

// Fraction of items whose exposure moved by less than 50%, by 50% up to
// 100%, and by 100% or more, relative to the old exposure. Items with no
// old exposure count as 100%+ if they gained any and <50% otherwise.
struct ImpactHistogram {
  double below_50 = 0.0;
  double from_50_to_100 = 0.0;
  double above_100 = 0.0;
  std::size_t num_items = 0;
};

double percent_change(double old_mass, double new_mass);
ImpactHistogram impact_histogram(const Distribution& old_dist,
                                 const Distribution& new_dist);

}  // namespace rollout
