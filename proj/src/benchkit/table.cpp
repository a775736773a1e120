// Copyright 2026 The cgg Authors.
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


#include "cgg/benchkit/table.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "cgg/core/error.hpp"

namespace cgg::bench {

namespace {

std::string percent(const Bucket& b) {
  if (b.total == 0) return "-";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * b.accuracy());
  return buf;
}

}  // namespace

RenderedTable render_table(const std::vector<NamedReport>& reports) {
  if (reports.empty()) throw UsageError("render_table: no reports");
  std::set<std::string> types;
  for (const auto& [name, r] : reports) {
    for (const auto& [t, b] : r.by_type) types.insert(t);
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"method", "acc", "correct/total"};
  header.insert(header.end(), types.begin(), types.end());
  rows.push_back(header);
  RenderedTable out;
  out.json = nlohmann::json::array();
  for (const auto& [name, r] : reports) {
    std::vector<std::string> row = {name, percent(r.overall),
                                    std::to_string(r.overall.correct) + "/" + std::to_string(r.overall.total)};
    for (const auto& t : types) {
      auto it = r.by_type.find(t);
      row.push_back(it == r.by_type.end() ? "-" : percent(it->second));
    }
    rows.push_back(std::move(row));
    out.json.push_back({{"name", name}, {"report", report_to_json(r)}});
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(width[c] - row[c].size(), ' ');
      // Name column left-aligned, numbers right-aligned.
      line += c == 0 ? row[c] + pad : "  " + pad + row[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out.text += line + "\n";
  }
  return out;
}

std::vector<NamedReport> table_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DataError("table: expected a JSON array");
  std::vector<NamedReport> out;
  for (const auto& row : j) {
    if (!row.contains("name") || !row.contains("report") || !row["name"].is_string()) {
      throw DataError("table: row needs name and report");
    }
    out.emplace_back(row["name"].get<std::string>(), report_from_json(row["report"]));
  }
  return out;
}

}  // namespace cgg::bench
