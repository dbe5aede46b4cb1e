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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rollout/errors.hpp"
#include "rollout/report.hpp"
#include "rollout/runner.hpp"
#include "rollout/solver.hpp"

namespace py = pybind11;
using namespace rollout;

namespace {

RunConfig config_from(const py::dict& settings) {
  RunConfig config;
  for (const auto& [key, value] : settings) {
    std::string text;
    if (py::isinstance<py::bool_>(value)) {
      text = value.cast<bool>() ? "true" : "false";
    } else {
      text = py::str(value).cast<std::string>();
    }
    apply_setting(config, key.cast<std::string>(), text);
  }
  config.validate();
  return config;
}

py::object json_loads(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

SelectionInstance make_instance(std::vector<double> exposure, std::uint64_t arrivals,
                                std::vector<double> target_share,
                                std::vector<double> relevance, std::size_t k, double theta,
                                std::optional<std::vector<std::size_t>> producer_of) {
  SelectionInstance inst;
  inst.exposure = std::move(exposure);
  inst.arrivals_so_far = arrivals;
  inst.target_share = std::move(target_share);
  inst.relevance = std::move(relevance);
  inst.k = k;
  inst.theta = theta;
  inst.floor = theta * max_utility(inst.relevance, k);
  if (producer_of) {
    auto map = std::make_shared<ProducerMap>();
    map->producer_of = *producer_of;
    std::size_t groups = 0;
    for (auto p : map->producer_of) groups = std::max(groups, p + 1);
    for (std::size_t p = 0; p < groups; ++p) map->producer_ids.push_back(std::to_string(p));
    inst.producers = map;
  }
  inst.validate();
  return inst;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Incremental recommendation rollout simulator";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<LoadError>(m, "LoadError", PyExc_OSError);
  py::register_exception<EmptyWindow>(m, "EmptyWindow", PyExc_RuntimeError);
  py::register_exception<PlanError>(m, "PlanError", PyExc_IndexError);
  py::register_exception<SizeLimit>(m, "SizeLimit", PyExc_OverflowError);
  py::register_exception<DegenerateCustomer>(m, "DegenerateCustomer", PyExc_ValueError);

  m.def(
      "run",
      [](const py::dict& settings, std::optional<std::filesystem::path> out) {
        const RunConfig config = config_from(settings);
        RunReport report;
        {
          py::gil_scoped_release release;
          report = run(config);
        }
        if (out) write_outputs(report, *out);
        return json_loads(report_json(report));
      },
      py::arg("settings"), py::arg("out") = py::none(),
      "Run one rollout. settings uses the config-file keys. Returns the report "
      "as a dict and optionally writes the output files.");

  m.def(
      "run_config_file",
      [](const std::filesystem::path& path) {
        const RunConfig config = load_config(path);
        RunReport report;
        {
          py::gil_scoped_release release;
          report = run(config);
        }
        if (config.output_dir) write_outputs(report, *config.output_dir);
        return json_loads(report_json(report));
      },
      py::arg("path"));

  m.def(
      "immediate_impact",
      [](const py::dict& settings) {
        return json_loads(impact_json(immediate_impact(config_from(settings))));
      },
      py::arg("settings"));

  m.def(
      "sweep",
      [](const py::dict& settings, std::vector<int> etas, std::vector<std::uint64_t> seeds,
         unsigned threads) {
        const RunConfig config = config_from(settings);
        SweepResult result;
        {
          py::gil_scoped_release release;
          result = sweep(config, etas, seeds, threads);
        }
        return json_loads(sweep_json(result));
      },
      py::arg("settings"), py::arg("etas"), py::arg("seeds") = std::vector<std::uint64_t>{0},
      py::arg("threads") = 0u);

  m.def(
      "solve",
      [](std::vector<double> exposure, std::uint64_t arrivals, std::vector<double> target_share,
         std::vector<double> relevance, std::size_t k, double theta,
         std::optional<std::vector<std::size_t>> producer_of, bool prefiltered) {
        SelectionInstance inst = make_instance(std::move(exposure), arrivals,
                                               std::move(target_share), std::move(relevance),
                                               k, theta, std::move(producer_of));
        if (prefiltered) inst = prefilter(inst);
        const Recommendation rec =
            inst.producers ? solve_producer_level(inst) : solve_exact(inst);
        const double value = inst.producers ? producer_objective(inst, rec.items)
                                            : objective(inst, rec.items);
        return py::make_tuple(rec.items, value);
      },
      py::arg("exposure"), py::arg("arrivals"), py::arg("target_share"), py::arg("relevance"),
      py::arg("k"), py::arg("theta"), py::arg("producer_of") = py::none(),
      py::arg("prefilter") = false,
      "Exact slate for one arrival. Returns (items, objective).");

  m.def(
      "brute_force",
      [](std::vector<double> exposure, std::uint64_t arrivals, std::vector<double> target_share,
         std::vector<double> relevance, std::size_t k, double theta,
         std::optional<std::vector<std::size_t>> producer_of) {
        const SelectionInstance inst =
            make_instance(std::move(exposure), arrivals, std::move(target_share),
                          std::move(relevance), k, theta, std::move(producer_of));
        const Recommendation rec =
            inst.producers ? brute_force_producer_level(inst) : brute_force(inst);
        const double value = inst.producers ? producer_objective(inst, rec.items)
                                            : objective(inst, rec.items);
        return py::make_tuple(rec.items, value);
      },
      py::arg("exposure"), py::arg("arrivals"), py::arg("target_share"), py::arg("relevance"),
      py::arg("k"), py::arg("theta"), py::arg("producer_of") = py::none());

  m.def(
      "top_k", [](const std::vector<double>& scores, std::size_t k) { return top_k(scores, k); },
      py::arg("scores"), py::arg("k"));
  m.def(
      "exposure_change",
      [](std::vector<double> a, std::vector<double> b) {
        return exposure_change(Distribution{std::move(a)}, Distribution{std::move(b)});
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "theta_schedule",
      [](const std::string& mode, int eta) { return theta_schedule(parse_theta_mode(mode), eta); },
      py::arg("mode"), py::arg("eta"));
  m.def(
      "transition_metrics",
      [](std::vector<double> step_ec, double ec_immediate) {
        StepSeries s;
        s.step_ec = std::move(step_ec);
        s.ec_immediate = ec_immediate;
        return py::make_tuple(path_length(s), max_transition_cost(s), transition_inequality(s));
      },
      py::arg("step_ec"), py::arg("ec_immediate"),
      "Returns (upsilon, pi, z); None where undefined.");
}
