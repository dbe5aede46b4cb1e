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

#include "rollout/exposure.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rollout/errors.hpp"

namespace rollout {

void Distribution::validate(double tol) const {
  double total = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw InvalidArgument("distribution has a negative or non-finite mass");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > tol) {
    throw InvalidArgument("distribution sums to " + std::to_string(total));
  }
}

ExposureLedger::ExposureLedger(std::size_t num_items, std::size_t k,
                               double window_start, double window_end)
    : slots_(num_items, 0), k_(k), start_(window_start), end_(window_end) {
  if (k == 0) throw InvalidArgument("ledger needs k >= 1");
}

void ExposureLedger::record(const Recommendation& rec) {
  if (rec.k() != k_) {
    throw InvalidArgument("recommendation has " + std::to_string(rec.k()) +
                          " items, ledger expects " + std::to_string(k_));
  }
  rec.validate(slots_.size());
  for (ItemIndex s : rec.items) ++slots_[s];
  ++arrivals_;
}

std::vector<double> ExposureLedger::exposures() const {
  std::vector<double> out(slots_.size());
  for (std::size_t s = 0; s < slots_.size(); ++s) out[s] = exposure(s);
  return out;
}

Distribution ExposureLedger::distribution() const {
  if (arrivals_ == 0) throw EmptyWindow("no arrivals recorded in window");
  const double total = static_cast<double>(arrivals_ * k_);
  Distribution d;
  d.mass.resize(slots_.size());
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    d.mass[s] = static_cast<double>(slots_[s]) / total;
  }
  return d;
}

std::vector<double> aggregate_by_producer(std::span<const double> per_item,
                                          const ProducerMap& producers) {
  if (per_item.size() != producers.producer_of.size()) {
    throw InvalidArgument("producer map and item vector sizes differ");
  }
  std::vector<double> out(producers.num_producers(), 0.0);
  for (std::size_t s = 0; s < per_item.size(); ++s) {
    out[producers.producer_of[s]] += per_item[s];
  }
  return out;
}

Distribution aggregate_by_producer(const Distribution& per_item,
                                   const ProducerMap& producers) {
  return Distribution{aggregate_by_producer(per_item.mass, producers)};
}

double exposure_change(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("exposure_change: universes differ (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) total += std::abs(b[s] - a[s]);
  return total;
}

double percent_change(double old_mass, double new_mass) {
  if (old_mass == 0.0) {
    return new_mass > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return std::abs(new_mass - old_mass) / old_mass * 100.0;
}

ImpactHistogram impact_histogram(const Distribution& old_dist,
                                 const Distribution& new_dist) {
  if (old_dist.size() != new_dist.size()) {
    throw InvalidArgument("impact_histogram: universes differ");
  }
  ImpactHistogram h;
  h.num_items = old_dist.size();
  if (h.num_items == 0) return h;
  std::size_t low = 0, mid = 0, high = 0;
  for (std::size_t s = 0; s < h.num_items; ++s) {
    const double pct = percent_change(old_dist[s], new_dist[s]);
    if (pct < 50.0) {
      ++low;
    } else if (pct < 100.0) {
      ++mid;
    } else {
      ++high;
    }
  }
  const double n = static_cast<double>(h.num_items);
  h.below_50 = static_cast<double>(low) / n;
  h.from_50_to_100 = static_cast<double>(mid) / n;
  h.above_100 = static_cast<double>(high) / n;
  return h;
}

}  // namespace rollout
