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

// rollout: run, compare and sweep incremental model rollouts.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rollout/config.hpp"
#include "rollout/errors.hpp"
#include "rollout/ingest.hpp"
#include "rollout/report.hpp"
#include "rollout/runner.hpp"

namespace {

using rollout::RunConfig;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config_path, "key = value config file");
  if (config_required) c->required();
  c->check(CLI::ExistingFile);
  cmd->add_option("--set", opts.overrides, "override a config key, e.g. --set k=5");
  cmd->add_option("--seed", opts.seed, "arrival and cohort seed");
  cmd->add_option("--method", opts.method, "ilp, cand or irf")
      ->check(CLI::IsMember({"ilp", "cand", "irf"}));
}

RunConfig resolve_config(const CommonOptions& opts) {
  RunConfig config;
  if (!opts.config_path.empty()) config = rollout::load_config(opts.config_path);
  for (const std::string& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw rollout::InvalidArgument("--set expects key=value, got '" + kv + "'");
    }
    rollout::apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed) config.seed = *opts.seed;
  if (opts.method) config.method = rollout::parse_method(*opts.method);
  config.validate();
  return config;
}

void print_metric(const char* name, const std::optional<double>& v) {
  if (v) {
    std::printf("%-14s %.6f\n", name, *v);
  } else {
    std::printf("%-14s undefined\n", name);
  }
}

int cmd_run(const CommonOptions& opts, const std::optional<std::string>& out,
            bool trace_solves, const std::optional<std::string>& export_trace) {
  RunConfig config = resolve_config(opts);
  if (trace_solves) config.trace_solves = true;
  if (out) config.output_dir = *out;

  const rollout::Dataset data = rollout::load_dataset(config);
  const rollout::ArrivalTrace trace = rollout::make_trace(config, data);
  if (export_trace) rollout::write_trace(*export_trace, trace, data.catalog);
  const rollout::RunReport report = rollout::run(config, data, trace);

  for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (!config.output_dir) {
    std::cout << rollout::report_json(report);
    return 0;
  }
  rollout::write_outputs(report, *config.output_dir);
  std::printf("%s  eta=%d k=%zu seed=%llu arrivals=%zu\n", config.label().c_str(),
              config.eta, config.k, static_cast<unsigned long long>(config.seed),
              report.log.size());
  print_metric("upsilon", report.metrics.upsilon);
  print_metric("pi", report.metrics.pi);
  print_metric("z", report.metrics.z);
  std::printf("%-14s %.6f\n", "ec_immediate", report.metrics.ec_immediate);
  if (report.degenerate) std::printf("degenerate run: see report.json\n");
  std::printf("wrote %s\n", config.output_dir->string().c_str());
  return 0;
}

int cmd_impact(const CommonOptions& opts, const std::optional<std::string>& out) {
  const RunConfig config = resolve_config(opts);
  const rollout::ImpactResult impact = rollout::immediate_impact(config);
  const std::string text = rollout::impact_json(impact);
  if (out) {
    std::filesystem::create_directories(*out);
    std::ofstream(std::filesystem::path(*out) / "impact.json", std::ios::binary) << text;
  }
  std::printf("EC(old, new)   %.6f\n", impact.ec);
  std::printf("<50%%           %.1f%%\n", 100.0 * impact.histogram.below_50);
  std::printf("50-100%%        %.1f%%\n", 100.0 * impact.histogram.from_50_to_100);
  std::printf("100%%+          %.1f%%\n", 100.0 * impact.histogram.above_100);
  return 0;
}

int cmd_sweep(const CommonOptions& opts, const std::vector<int>& etas,
              const std::vector<std::uint64_t>& seeds, unsigned threads,
              const std::optional<std::string>& out) {
  const RunConfig config = resolve_config(opts);
  const rollout::SweepResult result = rollout::sweep(config, etas, seeds, threads);
  if (out) rollout::write_sweep(result, *out);
  std::printf("%5s %5s %12s %12s %12s\n", "eta", "runs", "upsilon", "pi", "z");
  for (const auto& s : result.summary) {
    auto cell = [](const std::optional<double>& v) {
      return v ? std::to_string(*v) : std::string("undefined");
    };
    std::printf("%5d %5zu %12s %12s %12s\n", s.eta, s.runs, cell(s.mean_upsilon).c_str(),
                cell(s.mean_pi).c_str(), cell(s.mean_z).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate incremental recommendation model rollouts"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::optional<std::string> run_out;
  std::optional<std::string> export_trace;
  bool trace_solves = false;
  auto* run = app.add_subcommand("run", "simulate one rollout");
  add_common(run, run_opts, true);
  run->add_option("--out", run_out, "output directory (default: report.json to stdout)");
  run->add_flag("--trace-solves", trace_solves, "also write solves.csv");
  run->add_option("--export-trace", export_trace, "write the arrival trace as CSV");

  CommonOptions impact_opts;
  std::optional<std::string> impact_out;
  auto* impact = app.add_subcommand("impact", "compare old and new models served immediately");
  add_common(impact, impact_opts, true);
  impact->add_option("--out", impact_out, "directory for impact.json");

  CommonOptions sweep_opts;
  std::vector<int> etas;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  unsigned threads = 0;
  std::optional<std::string> sweep_out;
  auto* sweep = app.add_subcommand("sweep", "run several eta values and seeds");
  add_common(sweep, sweep_opts, false);
  sweep->add_option("--eta", etas, "comma-separated eta values")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sweep->add_option("--seeds", seeds, "comma-separated seeds")->delimiter(',');
  sweep->add_option("--threads", threads, "worker threads (0 = all cores)");
  sweep->add_option("--out", sweep_out, "directory for sweep.csv and sweep.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_opts, run_out, trace_solves, export_trace);
    if (*impact) return cmd_impact(impact_opts, impact_out);
    if (*sweep) return cmd_sweep(sweep_opts, etas, seeds, threads, sweep_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rollout: %s\n", e.what());
    return 1;
  }
  return 0;
}
