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

#include "rollout/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rollout/errors.hpp"

namespace rollout {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative slack on the floor comparison. Far tighter than kFloorTolerance;
// it only absorbs rounding between equal-valued sums.
double min_relevance(double floor) {
  return floor - 1e-12 * std::max(1.0, std::abs(floor));
}

// table(pos, r): sum of the r smallest (or largest) values in
// values[pos..end), or +inf (-inf) when fewer than r values remain.
class SuffixExtremes {
 public:
  SuffixExtremes(std::span<const double> values, std::size_t k, bool smallest)
      : k_(k), table_((values.size() + 1) * (k + 1)) {
    const double missing = smallest ? kInf : -kInf;
    auto order = [smallest](double a, double b) {
      return smallest ? a < b : a > b;
    };
    std::vector<double> buffer;
    buffer.reserve(k + 1);
    const std::size_t m = values.size();
    for (std::size_t r = 0; r <= k; ++r) at(m, r) = r == 0 ? 0.0 : missing;
    for (std::size_t pos = m; pos-- > 0;) {
      buffer.insert(std::upper_bound(buffer.begin(), buffer.end(), values[pos],
                                     order),
                    values[pos]);
      if (buffer.size() > k) buffer.pop_back();
      double sum = 0.0;
      at(pos, 0) = 0.0;
      for (std::size_t r = 1; r <= k; ++r) {
        if (r <= buffer.size()) {
          sum += buffer[r - 1];
          at(pos, r) = sum;
        } else {
          at(pos, r) = missing;
        }
      }
    }
  }

  double operator()(std::size_t pos, std::size_t r) const {
    return table_[pos * (k_ + 1) + r];
  }

 private:
  double& at(std::size_t pos, std::size_t r) { return table_[pos * (k_ + 1) + r]; }

  std::size_t k_;
  std::vector<double> table_;
};

// Shared incumbent logic. Before any slate is found, anything up to the
// seeded upper bound (plus tolerance) is acceptable so that a
// lexicographically smaller tie of the seed is still found. Afterwards only
// strict improvements count; the search visits slates in lexicographic
// order, so the first optimum it meets is the smallest one.
struct Incumbent {
  double upper = kInf;
  bool found = false;
  double best = kInf;
  std::vector<std::size_t> positions;

  bool acceptable(double cost) const {
    return found ? cost < best - kTieTolerance : cost <= upper + kTieTolerance;
  }
  void offer(double cost, const std::vector<std::size_t>& path) {
    if (!acceptable(cost)) return;
    found = true;
    best = cost;
    positions = path;
  }
};

__extension__ using Wide = unsigned __int128;

std::uint64_t binomial_capped(std::size_t n, std::size_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  // result * (n - i) / (i + 1) stays integral at every step.
  Wide result = 1;
  for (std::size_t i = 0; i < k; ++i) {
    result = result * (n - i) / (i + 1);
    if (result > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(result);
}

// Calls visit(positions) for every k-subset of [0, m) in lexicographic order.
void for_each_combination(std::size_t m, std::size_t k,
                          const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    visit(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Producer exposure and target of an instance, indexed by producer.
struct ProducerTerms {
  std::vector<double> exposure;
  std::vector<double> target;
  double k = 1.0;

  ProducerTerms(const SelectionInstance& inst, const ProducerMap& producers)
      : exposure(aggregate_by_producer(inst.exposure, producers)),
        k(static_cast<double>(inst.k)) {
    auto share = aggregate_by_producer(inst.target_share, producers);
    target.resize(share.size());
    const double scale = static_cast<double>(inst.arrivals_so_far + 1);
    for (std::size_t p = 0; p < share.size(); ++p) target[p] = scale * share[p];
  }

  double term(ProducerIndex p, std::size_t count) const {
    return std::abs(exposure[p] + static_cast<double>(count) / k - target[p]);
  }
  double marginal(ProducerIndex p, std::size_t count) const {
    return term(p, count + 1) - term(p, count);
  }
};

const ProducerMap& require_producers(const SelectionInstance& inst) {
  if (!inst.producers) {
    throw InvalidArgument("producer-level solve needs a producer map");
  }
  return *inst.producers;
}

Recommendation to_recommendation(const SelectionInstance& inst,
                                 const std::vector<ItemIndex>& items,
                                 const std::vector<std::size_t>& positions) {
  std::vector<ItemIndex> chosen;
  chosen.reserve(positions.size());
  for (std::size_t pos : positions) chosen.push_back(items[pos]);
  return Recommendation(inst.customer, std::move(chosen));
}

// Positions (into items) of the k most relevant candidates.
std::vector<std::size_t> most_relevant(const SelectionInstance& inst,
                                       const std::vector<ItemIndex>& items) {
  std::vector<double> rel(items.size());
  for (std::size_t j = 0; j < items.size(); ++j) rel[j] = inst.relevance[items[j]];
  auto best = top_k(rel, inst.k);
  std::sort(best.begin(), best.end());
  return best;
}

class ItemSearch {
 public:
  explicit ItemSearch(const SelectionInstance& inst)
      : items_(inst.candidate_items()),
        k_(inst.k),
        min_rel_(min_relevance(inst.floor)) {
    const std::size_t m = items_.size();
    delta_.resize(m);
    rel_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      delta_[j] = inst.delta(items_[j]);
      rel_[j] = inst.relevance[items_[j]];
    }
    cheapest_ = std::make_unique<SuffixExtremes>(delta_, k_, true);
    richest_ = std::make_unique<SuffixExtremes>(rel_, k_, false);
    seed(most_relevant(inst, items_));
    seed(cheapest_positions());
  }

  Recommendation run(const SelectionInstance& inst) {
    path_.clear();
    dfs(0, 0.0, 0.0);
    if (!incumbent_.found) {
      throw std::logic_error("solve_exact: no slate meets the utility floor");
    }
    return to_recommendation(inst, items_, incumbent_.positions);
  }

 private:
  std::vector<std::size_t> cheapest_positions() const {
    std::vector<std::size_t> order(items_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return delta_[a] < delta_[b];
    });
    order.resize(k_);
    std::sort(order.begin(), order.end());
    return order;
  }

  void seed(const std::vector<std::size_t>& positions) {
    double cost = 0.0, rel = 0.0;
    for (std::size_t pos : positions) {
      cost += delta_[pos];
      rel += rel_[pos];
    }
    if (rel >= min_rel_) incumbent_.upper = std::min(incumbent_.upper, cost);
  }

  void dfs(std::size_t pos, double cost, double rel) {
    const std::size_t need = k_ - path_.size();
    if (need == 0) {
      if (rel >= min_rel_) incumbent_.offer(cost, path_);
      return;
    }
    if (items_.size() - pos < need) return;
    if (rel + (*richest_)(pos, need) < min_rel_) return;
    if (!incumbent_.acceptable(cost + (*cheapest_)(pos, need))) return;

    path_.push_back(pos);
    dfs(pos + 1, cost + delta_[pos], rel + rel_[pos]);
    path_.pop_back();
    dfs(pos + 1, cost, rel);
  }

  std::vector<ItemIndex> items_;
  std::size_t k_;
  double min_rel_;
  std::vector<double> delta_;
  std::vector<double> rel_;
  std::unique_ptr<SuffixExtremes> cheapest_;
  std::unique_ptr<SuffixExtremes> richest_;
  Incumbent incumbent_;
  std::vector<std::size_t> path_;
};

class ProducerSearch {
 public:
  ProducerSearch(const SelectionInstance& inst, const ProducerMap& producers)
      : terms_(inst, producers),
        items_(inst.candidate_items()),
        k_(inst.k),
        min_rel_(min_relevance(inst.floor)),
        counts_(producers.num_producers(), 0),
        remaining_(producers.num_producers(), 0) {
    const std::size_t m = items_.size();
    owner_.resize(m);
    rel_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      owner_[j] = producers.producer_of[items_[j]];
      rel_[j] = inst.relevance[items_[j]];
      ++remaining_[owner_[j]];
    }
    richest_ = std::make_unique<SuffixExtremes>(rel_, k_, false);
    seed(most_relevant(inst, items_));
  }

  Recommendation run(const SelectionInstance& inst) {
    path_.clear();
    dfs(0, 0.0, 0.0);
    if (!incumbent_.found) {
      throw std::logic_error(
          "solve_producer_level: no slate meets the utility floor");
    }
    return to_recommendation(inst, items_, incumbent_.positions);
  }

 private:
  void seed(const std::vector<std::size_t>& positions) {
    std::vector<std::size_t> counts(counts_.size(), 0);
    double cost = 0.0, rel = 0.0;
    for (std::size_t pos : positions) {
      cost += terms_.marginal(owner_[pos], counts[owner_[pos]]++);
      rel += rel_[pos];
    }
    if (rel >= min_rel_) incumbent_.upper = std::min(incumbent_.upper, cost);
  }

  // Cheapest way to add `need` more slots using only items still ahead.
  // Producer terms are convex in the count, so taking the smallest marginal
  // increments across producers is exact when relevance is ignored.
  double completion_bound(std::size_t need) {
    scratch_.clear();
    for (ProducerIndex p = 0; p < remaining_.size(); ++p) {
      const std::size_t avail = std::min(remaining_[p], need);
      for (std::size_t j = 0; j < avail; ++j) {
        scratch_.push_back(terms_.marginal(p, counts_[p] + j));
      }
    }
    if (scratch_.size() < need) return kInf;
    std::nth_element(scratch_.begin(), scratch_.begin() + static_cast<long>(need - 1),
                     scratch_.end());
    std::sort(scratch_.begin(), scratch_.begin() + static_cast<long>(need));
    return std::accumulate(scratch_.begin(), scratch_.begin() + static_cast<long>(need), 0.0);
  }

  void dfs(std::size_t pos, double cost, double rel) {
    const std::size_t need = k_ - path_.size();
    if (need == 0) {
      if (rel >= min_rel_) incumbent_.offer(cost, path_);
      return;
    }
    if (items_.size() - pos < need) return;
    if (rel + (*richest_)(pos, need) < min_rel_) return;
    if (!incumbent_.acceptable(cost + completion_bound(need))) return;

    const ProducerIndex p = owner_[pos];
    --remaining_[p];
    const double step = terms_.marginal(p, counts_[p]);
    path_.push_back(pos);
    ++counts_[p];
    dfs(pos + 1, cost + step, rel + rel_[pos]);
    --counts_[p];
    path_.pop_back();
    dfs(pos + 1, cost, rel);
    ++remaining_[p];
  }

  ProducerTerms terms_;
  std::vector<ItemIndex> items_;
  std::size_t k_;
  double min_rel_;
  std::vector<ProducerIndex> owner_;
  std::vector<double> rel_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> remaining_;
  std::unique_ptr<SuffixExtremes> richest_;
  Incumbent incumbent_;
  std::vector<std::size_t> path_;
  std::vector<double> scratch_;
};

void check_enumerable(std::size_t m, std::size_t k) {
  if (binomial_capped(m, k, kBruteForceLimit) > kBruteForceLimit) {
    throw SizeLimit("brute force: C(" + std::to_string(m) + ", " +
                    std::to_string(k) + ") exceeds the enumeration limit");
  }
}

}  // namespace

double SelectionInstance::delta(ItemIndex s) const {
  const double gap = exposure[s] - target(s);
  return std::abs(gap + 1.0 / static_cast<double>(k)) - std::abs(gap);
}

std::vector<ItemIndex> SelectionInstance::candidate_items() const {
  if (!candidates.empty()) return candidates;
  std::vector<ItemIndex> all(num_items());
  std::iota(all.begin(), all.end(), ItemIndex{0});
  return all;
}

void SelectionInstance::validate() const {
  const std::size_t n = num_items();
  if (exposure.size() != n || target_share.size() != n) {
    throw InvalidArgument("selection instance vectors differ in length");
  }
  if (k == 0 || k > n) {
    throw InvalidArgument("selection instance needs 1 <= k <= |S|");
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (!(exposure[s] >= 0.0)) {
      throw InvalidArgument("selection instance has negative exposure");
    }
  }
  if (!candidates.empty()) {
    if (!std::is_sorted(candidates.begin(), candidates.end()) ||
        std::adjacent_find(candidates.begin(), candidates.end()) !=
            candidates.end() ||
        candidates.back() >= n) {
      throw InvalidArgument("candidate items must be ascending and in range");
    }
    if (candidates.size() < k) {
      throw InvalidArgument("fewer candidate items than k");
    }
  }
  if (producers) producers->validate(n);
}

SelectionInstance build_instance(const ExposureLedger& ledger,
                                 const RolloutPlan& plan, int step,
                                 CustomerIndex u, const RelevancePair& pair,
                                 std::size_t k,
                                 std::shared_ptr<const ProducerMap> producers) {
  if (ledger.k() != k) {
    throw InvalidArgument("ledger k differs from requested k");
  }
  SelectionInstance inst;
  inst.customer = u;
  inst.exposure = ledger.exposures();
  inst.arrivals_so_far = ledger.arrivals_seen();
  inst.target_share = plan.target(step).mass;
  auto row = pair.new_scores.row(u);
  inst.relevance.assign(row.begin(), row.end());
  inst.k = k;
  inst.theta = plan.theta(step);
  inst.floor = inst.theta * max_utility(inst.relevance, k);
  inst.producers = std::move(producers);
  if (inst.target_share.size() != inst.relevance.size()) {
    throw InvalidArgument("target distribution and catalog sizes differ");
  }
  return inst;
}

double objective(const SelectionInstance& inst,
                 std::span<const ItemIndex> items) {
  std::vector<char> picked(inst.num_items(), 0);
  for (ItemIndex s : items) picked[s] = 1;
  const double unit = 1.0 / static_cast<double>(inst.k);
  double total = 0.0;
  for (std::size_t s = 0; s < inst.num_items(); ++s) {
    total += std::abs(inst.exposure[s] + (picked[s] ? unit : 0.0) - inst.target(s));
  }
  return total;
}

double producer_objective(const SelectionInstance& inst,
                          std::span<const ItemIndex> items) {
  const ProducerMap& producers = require_producers(inst);
  ProducerTerms terms(inst, producers);
  std::vector<std::size_t> counts(producers.num_producers(), 0);
  for (ItemIndex s : items) ++counts[producers.producer_of[s]];
  double total = 0.0;
  for (ProducerIndex p = 0; p < counts.size(); ++p) total += terms.term(p, counts[p]);
  return total;
}

Recommendation solve_exact(const SelectionInstance& inst) {
  inst.validate();
  ItemSearch search(inst);
  return search.run(inst);
}

Recommendation solve_producer_level(const SelectionInstance& inst) {
  const ProducerMap& producers = require_producers(inst);
  inst.validate();
  ProducerSearch search(inst, producers);
  return search.run(inst);
}

Recommendation brute_force(const SelectionInstance& inst) {
  inst.validate();
  const auto items = inst.candidate_items();
  check_enumerable(items.size(), inst.k);
  const double min_rel = min_relevance(inst.floor);
  std::vector<double> delta(items.size());
  for (std::size_t j = 0; j < items.size(); ++j) delta[j] = inst.delta(items[j]);

  Incumbent incumbent;
  for_each_combination(items.size(), inst.k, [&](const std::vector<std::size_t>& idx) {
    double cost = 0.0, rel = 0.0;
    for (std::size_t pos : idx) {
      cost += delta[pos];
      rel += inst.relevance[items[pos]];
    }
    if (rel >= min_rel) incumbent.offer(cost, idx);
  });
  if (!incumbent.found) {
    throw std::logic_error("brute_force: no slate meets the utility floor");
  }
  return to_recommendation(inst, items, incumbent.positions);
}

Recommendation brute_force_producer_level(const SelectionInstance& inst) {
  const ProducerMap& producers = require_producers(inst);
  inst.validate();
  const auto items = inst.candidate_items();
  check_enumerable(items.size(), inst.k);
  const double min_rel = min_relevance(inst.floor);
  ProducerTerms terms(inst, producers);

  Incumbent incumbent;
  std::vector<std::size_t> counts(producers.num_producers());
  for_each_combination(items.size(), inst.k, [&](const std::vector<std::size_t>& idx) {
    std::fill(counts.begin(), counts.end(), 0);
    double cost = 0.0, rel = 0.0;
    for (std::size_t pos : idx) {
      const ProducerIndex p = producers.producer_of[items[pos]];
      cost += terms.marginal(p, counts[p]++);
      rel += inst.relevance[items[pos]];
    }
    if (rel >= min_rel) incumbent.offer(cost, idx);
  });
  if (!incumbent.found) {
    throw std::logic_error(
        "brute_force_producer_level: no slate meets the utility floor");
  }
  return to_recommendation(inst, items, incumbent.positions);
}

SelectionInstance prefilter(const SelectionInstance& inst) {
  inst.validate();
  const std::size_t n = inst.num_items();
  const std::size_t width = inst.k * inst.k;
  if (n <= width) return inst;

  double total = 0.0;
  for (double e : inst.exposure) total += e;
  std::vector<double> deviation(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double share = total > 0.0 ? inst.exposure[s] / total : 0.0;
    deviation[s] = std::abs(share - inst.target_share[s]);
  }

  std::vector<ItemIndex> keep = top_k(inst.relevance, width);
  auto by_deviation = top_k(deviation, width);
  keep.insert(keep.end(), by_deviation.begin(), by_deviation.end());
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

  SelectionInstance reduced = inst;
  reduced.candidates = std::move(keep);
  return reduced;
}

}  // namespace rollout
