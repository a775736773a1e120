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


// Link-level grounding accuracy with per-type and per-N breakdowns.
//
// The unit of evaluation is a distinct link id per sample: a person mentioned
// twice in one description is one prediction and counts once.

#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgg/benchkit/baselines.hpp"
#include "cgg/core/types.hpp"

namespace cgg::bench {

struct Bucket {
  std::size_t correct = 0;
  std::size_t total = 0;

  /// 0 for an empty bucket.
  double accuracy() const;
  bool operator==(const Bucket&) const = default;
};

struct EvalReport {
  Bucket overall;
  /// Keyed by commonsense type name; only types that occur.
  std::map<std::string, Bucket> by_type;
  /// Keyed by the number of candidate persons.
  std::map<std::size_t, Bucket> by_n;

  bool operator==(const EvalReport&) const = default;
};

/// predictions[i] belongs to samples[i]. Throws DataError naming the sample
/// when a prediction is missing a link or picks a nonexistent person, and
/// UsageError when the counts differ.
EvalReport evaluate(const std::vector<Assignment>& predictions, const std::vector<core::Sample>& samples);

/// {overall: {correct, total, accuracy}, by_type: {...}, by_n: {...}}
nlohmann::json report_to_json(const EvalReport& report);
/// Reads the counts back; accuracies are recomputed. Throws DataError.
EvalReport report_from_json(const nlohmann::json& j);

/// Mean over evaluated links of 1/N, the accuracy of a uniform guess.
double chance_accuracy(const std::vector<core::Sample>& samples);

}  // namespace cgg::bench
