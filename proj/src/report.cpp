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

#include "rollout/report.hpp"

#include <fstream>

#include <json.hpp>

#include "rollout/errors.hpp"

namespace rollout {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

template <typename T>
Json optional_value(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

Json config_json(const RunConfig& c) {
  Json j;
  j["label"] = c.label();
  if (c.files) {
    j["data"] = "files";
    j["old_scores"] = c.files->old_scores.generic_string();
    j["new_scores"] = c.files->new_scores.generic_string();
    j["format"] = to_string(c.files->format);
    j["producer_map"] = c.files->producer_map
                            ? Json(c.files->producer_map->generic_string())
                            : Json(nullptr);
  } else {
    j["data"] = "synthetic";
    j["customers"] = c.synthetic_customers;
    j["items"] = c.synthetic_items;
    j["data_seed"] = c.data_seed;
    j["producers"] = optional_value(c.synthetic_producers);
  }
  j["producer_prefix_len"] = optional_value(c.producer_prefix_len);
  j["trace_file"] = c.trace_file ? Json(c.trace_file->generic_string()) : Json(nullptr);
  j["k"] = c.k;
  j["eta"] = c.eta;
  j["method"] = to_string(c.method);
  j["targets"] = to_string(c.targets);
  j["theta"] = to_string(c.theta);
  j["prefilter"] = c.prefilter;
  j["producer_level"] = c.producer_level;
  j["seed"] = c.seed;
  j["trace_solves"] = c.trace_solves;
  j["epsilon"] = c.epsilon;
  return j;
}

Json histogram_json(const ImpactHistogram& h) {
  Json j;
  j["below_50"] = h.below_50;
  j["from_50_to_100"] = h.from_50_to_100;
  j["above_100"] = h.above_100;
  j["num_items"] = h.num_items;
  return j;
}

Json impact_to_json(const ImpactResult& impact) {
  Json j;
  j["ec"] = impact.ec;
  j["histogram"] = histogram_json(impact.histogram);
  j["old"] = impact.old_dist.mass;
  j["new"] = impact.new_dist.mass;
  return j;
}

Json metrics_json(const MetricsBlock& m) {
  Json j;
  j["upsilon"] = optional_value(m.upsilon);
  j["pi"] = optional_value(m.pi);
  j["z"] = optional_value(m.z);
  j["ec_immediate"] = m.ec_immediate;
  j["step_ec"] = m.step_ec;
  Json mean = Json::array(), std = Json::array(), min = Json::array(),
       count = Json::array();
  for (const auto& s : m.utility) {
    mean.push_back(s ? Json(s->mean) : Json(nullptr));
    std.push_back(s ? Json(s->std) : Json(nullptr));
    min.push_back(s ? Json(s->min) : Json(nullptr));
    count.push_back(s ? s->count : 0);
  }
  Json utility;
  utility["mean"] = std::move(mean);
  utility["std"] = std::move(std);
  utility["min"] = std::move(min);
  utility["count"] = std::move(count);
  j["utility"] = std::move(utility);
  return j;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

}  // namespace

std::string report_json(const RunReport& r) {
  Json j;
  j["config"] = config_json(r.config);
  j["num_customers"] = r.num_customers;
  j["num_items"] = r.num_items;
  j["num_producers"] = optional_value(r.num_producers);
  Json prov = Json::array();
  for (const auto& p : r.provenance) prov.push_back({{"path", p.path}, {"sha256", p.sha256}});
  j["provenance"] = std::move(prov);
  j["warnings"] = r.warnings;
  j["degenerate"] = r.degenerate;
  j["empty_warmup"] = r.empty_warmup;
  j["empty_steps"] = r.empty_steps;
  j["theta"] = r.theta;
  j["arrivals_per_step"] = r.arrivals_per_step;
  j["d0"] = r.d0.mass;
  j["dpred"] = r.dpred ? Json(r.dpred->mass) : Json(nullptr);
  j["d_eta"] = r.observed.empty() ? Json(nullptr) : Json(r.observed.back().mass);
  Json observed = Json::array();
  for (const auto& d : r.observed) observed.push_back(d.mass);
  j["observed"] = std::move(observed);
  j["metrics"] = metrics_json(r.metrics);
  Json over = Json::array();
  for (std::size_t i = 0; i < r.metrics.step_ec.size(); ++i) {
    if (r.metrics.step_ec[i] > r.config.epsilon) over.push_back(i + 1);
  }
  j["steps_over_epsilon"] = std::move(over);
  j["impact"] = r.impact ? impact_to_json(*r.impact) : Json(nullptr);
  return j.dump(2) + "\n";
}

std::string impact_json(const ImpactResult& impact) {
  return impact_to_json(impact).dump(2) + "\n";
}

std::string sweep_json(const SweepResult& result) {
  Json points = Json::array();
  for (const auto& p : result.points) {
    Json j;
    j["eta"] = p.eta;
    j["seed"] = p.seed;
    j["upsilon"] = optional_value(p.upsilon);
    j["pi"] = optional_value(p.pi);
    j["z"] = optional_value(p.z);
    j["ec_immediate"] = p.ec_immediate;
    points.push_back(std::move(j));
  }
  Json summary = Json::array();
  for (const auto& s : result.summary) {
    Json j;
    j["eta"] = s.eta;
    j["runs"] = s.runs;
    j["mean_upsilon"] = optional_value(s.mean_upsilon);
    j["mean_pi"] = optional_value(s.mean_pi);
    j["mean_z"] = optional_value(s.mean_z);
    summary.push_back(std::move(j));
  }
  Json j;
  j["points"] = std::move(points);
  j["summary"] = std::move(summary);
  return j.dump(2) + "\n";
}

void write_outputs(const RunReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  open_output(dir / "report.json") << report_json(r);

  {
    auto out = open_output(dir / "step_ec.csv");
    out << "step,ec\n";
    for (std::size_t i = 0; i < r.series.step_ec.size(); ++i) {
      out << i + 1 << ',' << format_double(r.series.step_ec[i]) << '\n';
    }
  }
  {
    auto out = open_output(dir / "utility.csv");
    out << "step,theta,count,mean,std,min\n";
    for (std::size_t i = 0; i < r.metrics.utility.size(); ++i) {
      const auto& s = r.metrics.utility[i];
      out << i + 1 << ',' << format_double(r.theta[i]) << ',' << (s ? s->count : 0) << ','
          << optional_cell(s ? std::optional(s->mean) : std::nullopt) << ','
          << optional_cell(s ? std::optional(s->std) : std::nullopt) << ','
          << optional_cell(s ? std::optional(s->min) : std::nullopt) << '\n';
    }
  }
  {
    auto out = open_output(dir / "exposure_by_step.csv");
    out << "step,item_id,exposure\n";
    for (std::size_t i = 0; i < r.exposure_by_step.size(); ++i) {
      for (std::size_t s = 0; s < r.exposure_by_step[i].size(); ++s) {
        out << i << ',' << r.item_ids[s] << ',' << format_double(r.exposure_by_step[i][s])
            << '\n';
      }
    }
  }
  if (r.config.trace_solves) {
    auto out = open_output(dir / "solves.csv");
    out << "time,customer,step,objective,utility_norm";
    for (std::size_t j = 0; j < r.config.k; ++j) out << ",item_" << j + 1;
    out << '\n';
    for (const auto& e : r.log) {
      out << format_double(e.time) << ',' << r.customer_ids[e.customer] << ',' << e.step
          << ',' << optional_cell(e.objective) << ',' << format_double(e.utility_norm);
      for (ItemIndex s : e.items) out << ',' << r.item_ids[s];
      out << '\n';
    }
  }
}

void write_sweep(const SweepResult& result, const fs::path& dir) {
  fs::create_directories(dir);
  open_output(dir / "sweep.json") << sweep_json(result);
  {
    auto out = open_output(dir / "sweep.csv");
    out << "eta,seed,upsilon,pi,z,ec_immediate\n";
    for (const auto& p : result.points) {
      out << p.eta << ',' << p.seed << ',' << optional_cell(p.upsilon) << ','
          << optional_cell(p.pi) << ',' << optional_cell(p.z) << ','
          << format_double(p.ec_immediate) << '\n';
    }
  }
  auto out = open_output(dir / "sweep_summary.csv");
  out << "eta,runs,mean_upsilon,mean_pi,mean_z\n";
  for (const auto& s : result.summary) {
    out << s.eta << ',' << s.runs << ',' << optional_cell(s.mean_upsilon) << ','
        << optional_cell(s.mean_pi) << ',' << optional_cell(s.mean_z) << '\n';
  }
}

}  // namespace rollout
