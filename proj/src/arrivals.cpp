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

#include "rollout/arrivals.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "rollout/errors.hpp"

namespace rollout {

int step_of(double time) { return static_cast<int>(std::floor(time)) + 1; }

std::span<const Arrival> ArrivalTrace::step(int i) const {
  auto lo = std::lower_bound(
      events.begin(), events.end(), static_cast<double>(i - 1),
      [](const Arrival& a, double t) { return a.time < t; });
  auto hi = std::lower_bound(
      lo, events.end(), static_cast<double>(i),
      [](const Arrival& a, double t) { return a.time < t; });
  return {events.data() + (lo - events.begin()),
          static_cast<std::size_t>(hi - lo)};
}

void ArrivalTrace::validate() const {
  if (eta < 1) throw InvalidArgument("trace needs eta >= 1");
  for (std::size_t j = 0; j < events.size(); ++j) {
    const double t = events[j].time;
    if (!(t >= -1.0 && t < static_cast<double>(eta))) {
      throw InvalidArgument("arrival time " + std::to_string(t) +
                            " outside [-1, eta)");
    }
    if (j > 0 && t < events[j - 1].time) {
      throw InvalidArgument("arrival trace is not time-sorted");
    }
  }
}

std::vector<double> sample_mean_interarrivals(std::size_t num_customers,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(kMeanInterarrival,
                                          std::sqrt(kInterarrivalVariance));
  std::vector<double> means;
  means.reserve(num_customers);
  while (means.size() < num_customers) {
    const double x = normal(rng);
    if (x < 0.0 || x > 2.0) continue;
    means.push_back(std::max(x, kMinMeanInterarrival));
  }
  return means;
}

ArrivalTrace generate_trace(std::span<const double> means, int eta,
                            std::uint64_t seed) {
  if (eta < 1) throw InvalidArgument("generate_trace: eta must be >= 1");
  for (double mu : means) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
      throw InvalidArgument("generate_trace: mean inter-arrival must be > 0");
    }
  }
  ArrivalTrace trace;
  trace.eta = eta;
  std::mt19937_64 rng(seed);
  const double end = static_cast<double>(eta);
  for (CustomerIndex u = 0; u < means.size(); ++u) {
    std::exponential_distribution<double> gap(1.0 / means[u]);
    double t = -1.0;
    while (true) {
      t += gap(rng);
      if (t >= end) break;
      trace.events.push_back({t, u});
    }
  }
  std::sort(trace.events.begin(), trace.events.end(),
            [](const Arrival& a, const Arrival& b) {
              if (a.time != b.time) return a.time < b.time;
              return a.customer < b.customer;
            });
  return trace;
}

}  // namespace rollout
