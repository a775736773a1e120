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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgg/core/types.hpp"
#include "cgg/rulekit/rules.hpp"

namespace cgg::rulekit {

enum class DropReason { kNoPersonLink, kNoCandidate, kSingleCandidate, kTooManyPersons, kTiedLinks };

inline constexpr std::size_t kNumDropReasons = 5;

std::string_view to_string(DropReason r);

/// Keep when `drop` is empty.
struct FilterVerdict {
  std::optional<DropReason> drop;

  bool keep() const { return !drop.has_value(); }
  static FilterVerdict Keep() { return {}; }
  static FilterVerdict Drop(DropReason r) { return {r}; }
  bool operator==(const FilterVerdict&) const = default;
};

/// Object links become words carrying their class name. Throws DataError on an
/// object link without a class name.
TokenList replace_object_links(const TokenList& tokens);

/// First triggered reason in the order NoPersonLink, NoCandidate,
/// SingleCandidate, TooManyPersons, TiedLinks.
FilterVerdict filter_sample(const core::Sample& sample);

/// Throws DataError for rule ids missing from the mapping.
core::CommonsenseType classify_commonsense(
    const std::string& rule_id, const std::map<std::string, core::CommonsenseType>& mapping);

struct CoverageReport {
  std::size_t total = 0;
  std::size_t matched = 0;
  /// Absent for an empty corpus.
  std::optional<double> matched_fraction;
  std::array<std::size_t, kNumQuestionTypes> matched_by_question_type{};
  std::vector<std::string> unmatched_ids;
};

CoverageReport coverage_report(const std::vector<QAPair>& corpus, const RuleSet& rules);
nlohmann::json coverage_to_json(const CoverageReport& report);

struct SplitSpec {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;
};

/// Seeded 64-bit FNV-1a over (seed, sample_id), mapped to [0, 1).
double split_hash_unit(const std::string& sample_id, std::uint64_t seed);

enum class Split { kTrain, kValidation, kTest };
Split assign_split(const std::string& sample_id, const SplitSpec& spec);

struct PipelineDrop {
  std::string sample_id;
  DropReason reason;
};

struct PipelineReport {
  std::size_t total = 0;
  std::size_t matched = 0;
  std::vector<std::string> unmatched_ids;
  std::array<std::size_t, kNumQuestionTypes> matched_by_question_type{};
  std::array<std::size_t, kNumDropReasons> drops_by_reason{};
  std::vector<PipelineDrop> drops;
  std::size_t kept = 0;
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

nlohmann::json pipeline_report_to_json(const PipelineReport& report);

struct PipelineResult {
  core::Dataset train;
  core::Dataset validation;
  core::Dataset test;
  PipelineReport report;
};

/// match -> transform -> replace_object_links -> filter -> tag -> split.
/// Output datasets are ordered by sample_id. `workers` > 1 processes samples
/// concurrently; the result does not depend on it.
PipelineResult run_pipeline(const std::vector<QAPair>& corpus, const core::DatasetHeader& header,
                            const RuleSet& rules, const SplitSpec& split, int workers = 1);

/// Runs only the filter stage over an existing set of records.
struct FilterResult {
  core::Dataset kept;
  std::array<std::size_t, kNumDropReasons> drops_by_reason{};
  std::vector<PipelineDrop> drops;
};
FilterResult filter_dataset(const core::Dataset& dataset);
nlohmann::json filter_report_to_json(const FilterResult& result);

// QA corpus files share the dataset header, region layout and feature file;
// each record carries "question", "answers" (4 token arrays), "correct_index"
// and optionally "labels" (defaults to link id == person index).
struct QACorpus {
  core::DatasetHeader header;
  std::vector<QAPair> pairs;
};

QACorpus read_qa_corpus(const std::filesystem::path& path);
void write_qa_corpus(const QACorpus& corpus, const std::filesystem::path& path);

}  // namespace cgg::rulekit
