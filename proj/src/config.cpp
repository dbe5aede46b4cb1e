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

#include "rollout/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rollout/errors.hpp"

namespace rollout {

namespace {

namespace fs = std::filesystem;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw InvalidArgument("config: '" + std::string(key) + "' expects an integer, got '" +
                          std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw InvalidArgument("config: '" + std::string(key) + "' expects a number, got '" +
                          std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "on" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "off" || value == "no" || value == "0") return false;
  throw InvalidArgument("config: '" + std::string(key) + "' expects true/false, got '" +
                        std::string(value) + "'");
}

fs::path resolve(std::string_view value, const fs::path& base_dir) {
  fs::path p{std::string(value)};
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p;
}

BundlePaths& files_of(RunConfig& config) {
  if (!config.files) config.files.emplace();
  return *config.files;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kIlp: return "ilp";
    case Method::kCand: return "cand";
    case Method::kIrf: return "irf";
  }
  return "ilp";
}

Method parse_method(std::string_view text) {
  if (text == "ilp") return Method::kIlp;
  if (text == "cand") return Method::kCand;
  if (text == "irf") return Method::kIrf;
  throw InvalidArgument("unknown method '" + std::string(text) + "'");
}

void RunConfig::validate() const {
  if (k < 1) throw InvalidArgument("config: k must be >= 1");
  if (eta < 1) throw InvalidArgument("config: eta must be >= 1");
  if (prefilter && method != Method::kIlp) {
    throw InvalidArgument("config: prefilter applies only to method=ilp");
  }
  if (producer_level && method != Method::kIlp) {
    throw InvalidArgument("config: producer_level applies only to method=ilp");
  }
  if (files) {
    if (files->old_scores.empty() || files->new_scores.empty()) {
      throw InvalidArgument("config: both old_scores and new_scores are required");
    }
  } else if (synthetic_customers == 0 || synthetic_items == 0) {
    throw InvalidArgument("config: synthetic data needs customers, items >= 1");
  }
  if (synthetic_producers && *synthetic_producers == 0) {
    throw InvalidArgument("config: producers must be >= 1");
  }
  if (producer_prefix_len && *producer_prefix_len == 0) {
    throw InvalidArgument("config: producer_prefix_len must be >= 1");
  }
}

std::string RunConfig::label() const {
  if (method != Method::kIlp) return std::string(to_string(method));
  std::string tag = "ilp-";
  tag += targets == TargetMode::kEstimated ? 'E' : 'P';
  tag += theta == ThetaMode::kLinear ? 'L' : 'G';
  if (producer_level) tag += "-producer";
  if (prefilter) tag += "(PF)";
  return tag;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   const fs::path& base_dir) {
  if (key == "data") {
    if (value == "synthetic") {
      config.files.reset();
    } else if (value == "files") {
      files_of(config);
    } else {
      throw InvalidArgument("config: data must be synthetic or files");
    }
  } else if (key == "customers") {
    config.synthetic_customers = parse_integer<std::size_t>(key, value);
  } else if (key == "items") {
    config.synthetic_items = parse_integer<std::size_t>(key, value);
  } else if (key == "data_seed") {
    config.data_seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "producers") {
    config.synthetic_producers = parse_integer<std::size_t>(key, value);
  } else if (key == "old_scores") {
    files_of(config).old_scores = resolve(value, base_dir);
  } else if (key == "new_scores") {
    files_of(config).new_scores = resolve(value, base_dir);
  } else if (key == "format") {
    files_of(config).format = parse_matrix_format(value);
  } else if (key == "producer_map") {
    files_of(config).producer_map = resolve(value, base_dir);
  } else if (key == "producer_prefix_len") {
    config.producer_prefix_len = parse_integer<std::size_t>(key, value);
  } else if (key == "trace_file") {
    config.trace_file = resolve(value, base_dir);
  } else if (key == "k") {
    config.k = parse_integer<std::size_t>(key, value);
  } else if (key == "eta") {
    config.eta = parse_integer<int>(key, value);
  } else if (key == "method") {
    config.method = parse_method(value);
  } else if (key == "targets") {
    config.targets = parse_target_mode(value);
  } else if (key == "theta") {
    config.theta = parse_theta_mode(value);
  } else if (key == "prefilter") {
    config.prefilter = parse_bool(key, value);
  } else if (key == "producer_level") {
    config.producer_level = parse_bool(key, value);
  } else if (key == "seed") {
    config.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "out") {
    config.output_dir = resolve(value, base_dir);
  } else if (key == "trace_solves") {
    config.trace_solves = parse_bool(key, value);
  } else if (key == "epsilon") {
    config.epsilon = parse_real(key, value);
  } else {
    throw InvalidArgument("config: unknown key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::string_view text, const fs::path& base_dir) {
  RunConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    apply_setting(config, trim(view.substr(0, eq)), trim(view.substr(eq + 1)), base_dir);
  }
  config.validate();
  return config;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

}  // namespace rollout
