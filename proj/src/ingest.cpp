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

#include "rollout/ingest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "rollout/errors.hpp"

namespace rollout {

namespace {

namespace fs = std::filesystem;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

// Rows of a CSV file with a mandatory header. Blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    if (!have_header) {
      table.header = split_row(line);
      have_header = true;
      continue;
    }
    table.rows.push_back(split_row(line));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw LoadError(path.string() + ": missing header row");
  return table;
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

double parse_number(std::string_view text, const fs::path& path,
                    std::size_t line) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw LoadError(where(path, line) + "cannot parse number '" +
                    std::string(text) + "'");
  }
  if (!std::isfinite(value)) {
    throw LoadError(where(path, line) + "score is not finite");
  }
  return value;
}

double parse_score(std::string_view text, const fs::path& path,
                   std::size_t line) {
  const double value = parse_number(text, path, line);
  if (value < 0.0) {
    throw LoadError(where(path, line) + "negative score " + std::string(text));
  }
  return value;
}

std::unordered_map<std::string, std::size_t> index_of(
    const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < ids.size(); ++i) idx.emplace(ids[i], i);
  return idx;
}

std::vector<std::string> sorted_unique(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

// One relevance file, before cross-validation against its partner.
struct ParsedScores {
  std::vector<std::string> customers;
  std::vector<std::string> items;
  ScoreMatrix scores;
  std::size_t missing = 0;
};

ParsedScores parse_triples(const fs::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 3) {
    throw LoadError(path.string() +
                    ": triples header must be customer_id,item_id,score");
  }
  std::vector<std::string> customers, items;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != 3) {
      throw LoadError(where(path, table.line_numbers[r]) + "expected 3 fields");
    }
    if (row[0].empty() || row[1].empty()) {
      throw LoadError(where(path, table.line_numbers[r]) + "empty id");
    }
    customers.push_back(row[0]);
    items.push_back(row[1]);
  }
  ParsedScores parsed;
  parsed.customers = sorted_unique(std::move(customers));
  parsed.items = sorted_unique(std::move(items));
  const auto cidx = index_of(parsed.customers);
  const auto iidx = index_of(parsed.items);
  parsed.scores = ScoreMatrix(parsed.customers.size(), parsed.items.size());
  std::vector<char> seen(parsed.customers.size() * parsed.items.size(), 0);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t u = cidx.at(row[0]);
    const std::size_t s = iidx.at(row[1]);
    char& flag = seen[u * parsed.items.size() + s];
    if (flag) {
      throw LoadError(where(path, table.line_numbers[r]) + "duplicate pair (" +
                      row[0] + ", " + row[1] + ")");
    }
    flag = 1;
    parsed.scores(u, s) = parse_score(row[2], path, table.line_numbers[r]);
  }
  parsed.missing = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 0));
  return parsed;
}

ParsedScores parse_dense(const fs::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 2) {
    throw LoadError(path.string() + ": dense header needs at least one item id");
  }
  std::vector<std::string> file_items(table.header.begin() + 1, table.header.end());
  ParsedScores parsed;
  parsed.items = sorted_unique(file_items);
  if (parsed.items.size() != file_items.size()) {
    throw LoadError(path.string() + ": duplicate item id in header");
  }
  std::vector<std::string> customers;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      throw LoadError(where(path, table.line_numbers[r]) + "expected " +
                      std::to_string(table.header.size()) + " fields");
    }
    customers.push_back(table.rows[r][0]);
  }
  parsed.customers = sorted_unique(customers);
  if (parsed.customers.size() != customers.size()) {
    throw LoadError(path.string() + ": duplicate customer row");
  }
  const auto cidx = index_of(parsed.customers);
  const auto iidx = index_of(parsed.items);
  std::vector<std::size_t> column(file_items.size());
  for (std::size_t c = 0; c < file_items.size(); ++c) column[c] = iidx.at(file_items[c]);

  parsed.scores = ScoreMatrix(parsed.customers.size(), parsed.items.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t u = cidx.at(row[0]);
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c].empty()) {
        ++parsed.missing;
        continue;
      }
      parsed.scores(u, column[c - 1]) = parse_score(row[c], path, table.line_numbers[r]);
    }
  }
  return parsed;
}

ParsedScores parse_scores(const fs::path& path, MatrixFormat format) {
  return format == MatrixFormat::kTriples ? parse_triples(path) : parse_dense(path);
}

std::string describe_difference(const std::vector<std::string>& a,
                                const std::vector<std::string>& b) {
  std::vector<std::string> only_a, only_b;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
  std::ostringstream out;
  out << only_a.size() << " only in old";
  if (!only_a.empty()) out << " (e.g. '" << only_a.front() << "')";
  out << ", " << only_b.size() << " only in new";
  if (!only_b.empty()) out << " (e.g. '" << only_b.front() << "')";
  return out.str();
}

std::ofstream open_for_write(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string_view to_string(MatrixFormat format) {
  return format == MatrixFormat::kTriples ? "triples" : "dense";
}

MatrixFormat parse_matrix_format(std::string_view text) {
  if (text == "triples") return MatrixFormat::kTriples;
  if (text == "dense") return MatrixFormat::kDense;
  throw InvalidArgument("unknown matrix format '" + std::string(text) + "'");
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw LoadError("sha256 unavailable");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

DatasetBundle load_bundle(const BundlePaths& paths) {
  ParsedScores old_scores = parse_scores(paths.old_scores, paths.format);
  ParsedScores new_scores = parse_scores(paths.new_scores, paths.format);
  if (old_scores.items != new_scores.items) {
    throw LoadError("dimension mismatch: item sets differ; " +
                    describe_difference(old_scores.items, new_scores.items));
  }
  if (old_scores.customers != new_scores.customers) {
    throw LoadError("dimension mismatch: customer sets differ; " +
                    describe_difference(old_scores.customers, new_scores.customers));
  }
  if (new_scores.items.empty() || new_scores.customers.empty()) {
    throw LoadError("relevance files contain no scores");
  }

  DatasetBundle bundle;
  bundle.catalog.customers = std::move(new_scores.customers);
  bundle.catalog.items = std::move(new_scores.items);
  bundle.relevance.old_scores = std::move(old_scores.scores);
  bundle.relevance.new_scores = std::move(new_scores.scores);
  bundle.missing_old = old_scores.missing;
  bundle.missing_new = new_scores.missing;
  bundle.provenance.push_back({paths.old_scores.string(), file_sha256(paths.old_scores)});
  bundle.provenance.push_back({paths.new_scores.string(), file_sha256(paths.new_scores)});

  const double cells = static_cast<double>(bundle.catalog.num_customers() *
                                           bundle.catalog.num_items());
  auto warn_missing = [&](const char* which, std::size_t missing) {
    if (static_cast<double>(missing) > kMissingWarnFraction * cells) {
      bundle.warnings.push_back(std::string(which) + " relevance: " +
                                std::to_string(missing) + " of " +
                                std::to_string(static_cast<std::size_t>(cells)) +
                                " pairs missing, defaulted to 0");
    }
  };
  warn_missing("old", bundle.missing_old);
  warn_missing("new", bundle.missing_new);

  if (paths.producer_map) {
    bundle.catalog.producers = load_producer_map(*paths.producer_map, bundle.catalog);
    bundle.provenance.push_back(
        {paths.producer_map->string(), file_sha256(*paths.producer_map)});
  } else if (paths.producer_prefix_len) {
    bundle.catalog.producers =
        derive_producer_map_by_prefix(bundle.catalog.items, *paths.producer_prefix_len);
  }

  try {
    bundle.catalog.validate();
    bundle.relevance.validate(bundle.catalog);
  } catch (const InvalidArgument& e) {
    throw LoadError(e.what());
  }
  return bundle;
}

ProducerMap derive_producer_map_by_prefix(std::span<const std::string> item_ids,
                                          std::size_t prefix_len) {
  if (prefix_len == 0) throw InvalidArgument("producer prefix length must be >= 1");
  std::vector<std::string> prefixes;
  prefixes.reserve(item_ids.size());
  for (const auto& id : item_ids) prefixes.push_back(id.substr(0, prefix_len));
  ProducerMap map;
  map.producer_ids = sorted_unique(prefixes);
  const auto pidx = index_of(map.producer_ids);
  map.producer_of.reserve(item_ids.size());
  for (const auto& prefix : prefixes) map.producer_of.push_back(pidx.at(prefix));
  return map;
}

ProducerMap load_producer_map(const fs::path& path, const Catalog& catalog) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 2) {
    throw LoadError(path.string() + ": header must be item_id,producer_id");
  }
  const auto iidx = index_of(catalog.items);
  std::vector<std::string> owner(catalog.num_items());
  std::vector<char> seen(catalog.num_items(), 0);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != 2 || row[1].empty()) {
      throw LoadError(where(path, table.line_numbers[r]) + "expected item_id,producer_id");
    }
    auto it = iidx.find(row[0]);
    if (it == iidx.end()) {
      throw LoadError(where(path, table.line_numbers[r]) + "unknown item '" + row[0] + "'");
    }
    if (seen[it->second]) {
      throw LoadError(where(path, table.line_numbers[r]) + "item '" + row[0] +
                      "' mapped twice");
    }
    seen[it->second] = 1;
    owner[it->second] = row[1];
  }
  for (std::size_t s = 0; s < seen.size(); ++s) {
    if (!seen[s]) {
      throw LoadError(path.string() + ": item '" + catalog.items[s] + "' has no producer");
    }
  }
  ProducerMap map;
  map.producer_ids = sorted_unique(owner);
  const auto pidx = index_of(map.producer_ids);
  for (const auto& p : owner) map.producer_of.push_back(pidx.at(p));
  return map;
}

void write_scores(const fs::path& path, MatrixFormat format,
                  const Catalog& catalog, const ScoreMatrix& scores) {
  auto out = open_for_write(path);
  if (format == MatrixFormat::kTriples) {
    out << "customer_id,item_id,score\n";
    for (std::size_t u = 0; u < scores.rows(); ++u) {
      for (std::size_t s = 0; s < scores.cols(); ++s) {
        out << catalog.customers[u] << ',' << catalog.items[s] << ','
            << format_double(scores(u, s)) << '\n';
      }
    }
  } else {
    out << "customer_id";
    for (const auto& id : catalog.items) out << ',' << id;
    out << '\n';
    for (std::size_t u = 0; u < scores.rows(); ++u) {
      out << catalog.customers[u];
      for (std::size_t s = 0; s < scores.cols(); ++s) out << ',' << format_double(scores(u, s));
      out << '\n';
    }
  }
}

void write_producer_map(const fs::path& path, const Catalog& catalog) {
  if (!catalog.producers) throw InvalidArgument("catalog has no producer map");
  auto out = open_for_write(path);
  out << "item_id,producer_id\n";
  for (std::size_t s = 0; s < catalog.num_items(); ++s) {
    out << catalog.items[s] << ','
        << catalog.producers->producer_ids[catalog.producers->producer_of[s]] << '\n';
  }
}

void write_trace(const fs::path& path, const ArrivalTrace& trace,
                 const Catalog& catalog) {
  auto out = open_for_write(path);
  out << "time,customer_id\n";
  for (const Arrival& a : trace.events) {
    out << format_double(a.time) << ',' << catalog.customers.at(a.customer) << '\n';
  }
}

ArrivalTrace read_trace(const fs::path& path, const Catalog& catalog, int eta) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 2) {
    throw LoadError(path.string() + ": header must be time,customer_id");
  }
  const auto cidx = index_of(catalog.customers);
  ArrivalTrace trace;
  trace.eta = eta;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != 2) {
      throw LoadError(where(path, table.line_numbers[r]) + "expected time,customer_id");
    }
    auto it = cidx.find(row[1]);
    if (it == cidx.end()) {
      throw LoadError(where(path, table.line_numbers[r]) + "unknown customer '" +
                      row[1] + "'");
    }
    trace.events.push_back({parse_number(row[0], path, table.line_numbers[r]), it->second});
  }
  try {
    trace.validate();
  } catch (const InvalidArgument& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return trace;
}

}  // namespace rollout
