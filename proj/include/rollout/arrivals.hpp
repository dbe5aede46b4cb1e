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

// Time is measured in periods. The warm-up window is [-1, 0) and update
// step i covers [i - 1, i) for i = 1..eta.
struct Arrival {
  double time = 0.0;
  CustomerIndex customer = 0;

  friend bool operator==(const Arrival&, const Arrival&) = default;
};

// Step index of a login time: 0 for warm-up, i for [i - 1, i).
int step_of(double time);

struct ArrivalTrace {
  std::vector<Arrival> events;
  int eta = 0;

  double horizon() const { return eta + 1.0; }

  // Events of one step, as a contiguous slice of the sorted trace.
  std::span<const Arrival> step(int i) const;
  std::span<const Arrival> warmup() const { return step(0); }

  // Throws InvalidArgument if events are unsorted or outside [-1, eta).
  void validate() const;

  friend bool operator==(const ArrivalTrace&, const ArrivalTrace&) = default;
};

// Per-customer mean inter-arrival time: Normal(1, variance 0.2) truncated to
// [0, 2] by rejection, then floored at kMinMeanInterarrival.
inline constexpr double kMeanInterarrival = 1.0;
inline constexpr double kInterarrivalVariance = 0.2;
inline constexpr double kMinMeanInterarrival = 1e-3;

std::vector<double> sample_mean_interarrivals(std::size_t num_customers,
                                              std::uint64_t seed);

// Independent Poisson login processes, one per customer, with exponential
// gaps of the customer's mean starting at time -1. Events before eta are
// kept; the merged trace is sorted by (time, customer).
ArrivalTrace generate_trace(std::span<const double> means, int eta,
                            std::uint64_t seed);

}  // namespace rollout
