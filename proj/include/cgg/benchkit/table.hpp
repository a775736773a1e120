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


// Side-by-side result tables.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgg/benchkit/evaluate.hpp"

namespace cgg::bench {

using NamedReport = std::pair<std::string, EvalReport>;

struct RenderedTable {
  /// Aligned plain text, one row per report in the given order.
  std::string text;
  /// [{"name": ..., "report": {...}}, ...]
  nlohmann::json json;
};

/// Throws UsageError for an empty list.
RenderedTable render_table(const std::vector<NamedReport>& reports);
std::vector<NamedReport> table_from_json(const nlohmann::json& j);

}  // namespace cgg::bench
