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

#include "cgg/rulekit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "cgg/core/dataset_io.hpp"
#include "cgg/core/error.hpp"
#include "cgg/core/parallel.hpp"
#include "cgg/core/validate.hpp"

namespace cgg::rulekit {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kNumDropReasons> kDropNames = {
    "NoPersonLink", "NoCandidate", "SingleCandidate", "TooManyPersons", "TiedLinks"};

json drops_to_json(const std::array<std::size_t, kNumDropReasons>& counts,
                   const std::vector<PipelineDrop>& drops) {
  json by_reason = json::object();
  for (std::size_t i = 0; i < kNumDropReasons; ++i) by_reason[std::string(kDropNames[i])] = counts[i];
  json list = json::array();
  for (const auto& d : drops) {
    list.push_back({{"sample_id", d.sample_id}, {"reason", std::string(to_string(d.reason))}});
  }
  return {{"by_reason", std::move(by_reason)}, {"samples", std::move(list)}};
}

json question_types_to_json(const std::array<std::size_t, kNumQuestionTypes>& counts) {
  json out = json::object();
  for (std::size_t i = 0; i < kNumQuestionTypes; ++i) {
    out[std::string(to_string(static_cast<QuestionType>(i)))] = counts[i];
  }
  return out;
}

// Outcome of the per-sample stages; computed independently per pair.
struct StageOutcome {
  std::optional<std::string> rule_id;
  QuestionType question_type = QuestionType::kOther;
  std::optional<core::Sample> sample;
  FilterVerdict verdict;
};

StageOutcome process_pair(const QAPair& qa, const core::DatasetHeader& header, const RuleSet& rules,
                          const std::map<std::string, core::CommonsenseType>& mapping) {
  StageOutcome out;
  out.rule_id = match_rule(qa, rules);
  if (!out.rule_id) return out;
  const Rule& rule = *rules.find(*out.rule_id);
  out.question_type = rule.question_type;

  core::Sample s;
  s.sample_id = qa.sample_id;
  s.image = qa.image;
  try {
    s.description.tokens = replace_object_links(transform(qa, rule));
  } catch (const DataError& e) {
    throw DataError("sample " + qa.sample_id + ": " + e.what());
  }
  // Labels are copied leniently; a kept sample with a missing or out-of-range
  // label fails finished-sample validation below.
  for (int id : s.description.distinct_links()) {
    if (auto it = qa.labels.pairs.find(id); it != qa.labels.pairs.end()) {
      s.labels.pairs[id] = it->second;
    }
  }
  out.verdict = filter_sample(s);
  if (out.verdict.keep()) {
    s.commonsense_type = classify_commonsense(rule.id, mapping);
    core::validate_sample(s, header, core::Validation::kFinished);
  }
  out.sample = std::move(s);
  return out;
}

}  // namespace

std::string_view to_string(DropReason r) { return kDropNames[static_cast<std::size_t>(r)]; }

TokenList replace_object_links(const TokenList& tokens) {
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (const auto* o = std::get_if<core::ObjectLink>(&t)) {
      if (o->class_name.empty()) {
        throw DataError("object link to region " + std::to_string(o->region_id) +
                        " has no class name");
      }
      out.push_back(core::Word{o->class_name});
    } else {
      out.push_back(t);
    }
  }
  return out;
}

FilterVerdict filter_sample(const core::Sample& s) {
  const std::size_t n = s.image.persons.size();
  if (s.description.num_links() == 0) return FilterVerdict::Drop(DropReason::kNoPersonLink);
  if (n == 0) return FilterVerdict::Drop(DropReason::kNoCandidate);
  if (n == 1) return FilterVerdict::Drop(DropReason::kSingleCandidate);
  if (n > core::kMaxPersons) return FilterVerdict::Drop(DropReason::kTooManyPersons);
  if (core::has_tied_links(s.description.tokens)) return FilterVerdict::Drop(DropReason::kTiedLinks);
  return FilterVerdict::Keep();
}

core::CommonsenseType classify_commonsense(
    const std::string& rule_id, const std::map<std::string, core::CommonsenseType>& mapping) {
  auto it = mapping.find(rule_id);
  if (it == mapping.end()) throw DataError("no commonsense type for rule '" + rule_id + "'");
  return it->second;
}

CoverageReport coverage_report(const std::vector<QAPair>& corpus, const RuleSet& rules) {
  CoverageReport rep;
  rep.total = corpus.size();
  for (const auto& qa : corpus) {
    if (auto id = match_rule(qa, rules)) {
      ++rep.matched;
      ++rep.matched_by_question_type[static_cast<std::size_t>(rules.find(*id)->question_type)];
    } else {
      rep.unmatched_ids.push_back(qa.sample_id);
    }
  }
  if (rep.total > 0) {
    rep.matched_fraction = static_cast<double>(rep.matched) / static_cast<double>(rep.total);
  }
  return rep;
}

json coverage_to_json(const CoverageReport& r) {
  return {{"total", r.total},
          {"matched", r.matched},
          {"matched_fraction", r.matched_fraction ? json(*r.matched_fraction) : json(nullptr)},
          {"matched_by_question_type", question_types_to_json(r.matched_by_question_type)},
          {"unmatched_ids", r.unmatched_ids}};
}

double split_hash_unit(const std::string& sample_id, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>((seed >> (8 * i)) & 0xff));
  for (char c : sample_id) mix(static_cast<unsigned char>(c));
  // Final avalanche so that ids differing in the last byte spread out.
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

Split assign_split(const std::string& sample_id, const SplitSpec& spec) {
  const double u = split_hash_unit(sample_id, spec.seed);
  if (u < spec.train) return Split::kTrain;
  if (u < spec.train + spec.validation) return Split::kValidation;
  return Split::kTest;
}

json pipeline_report_to_json(const PipelineReport& r) {
  return {{"total", r.total},
          {"matched", r.matched},
          {"unmatched", r.unmatched_ids.size()},
          {"unmatched_ids", r.unmatched_ids},
          {"matched_fraction", r.total > 0 ? json(static_cast<double>(r.matched) /
                                                  static_cast<double>(r.total))
                                           : json(nullptr)},
          {"matched_by_question_type", question_types_to_json(r.matched_by_question_type)},
          {"drops", drops_to_json(r.drops_by_reason, r.drops)},
          {"kept", r.kept},
          {"splits", {{"train", r.train}, {"validation", r.validation}, {"test", r.test}}}};
}

PipelineResult run_pipeline(const std::vector<QAPair>& corpus, const core::DatasetHeader& header,
                            const RuleSet& rules, const SplitSpec& split, int workers) {
  if (rules.empty()) throw UsageError("rule set is empty");
  for (double f : {split.train, split.validation, split.test}) {
    if (f < 0.0) throw UsageError("split fractions must be non-negative");
  }
  if (std::abs(split.train + split.validation + split.test - 1.0) > 1e-9) {
    throw UsageError("split fractions must sum to 1");
  }

  std::vector<const QAPair*> order;
  order.reserve(corpus.size());
  for (const auto& qa : corpus) order.push_back(&qa);
  std::sort(order.begin(), order.end(),
            [](const QAPair* a, const QAPair* b) { return a->sample_id < b->sample_id; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->sample_id == order[i - 1]->sample_id) {
      throw DataError("duplicate sample_id " + order[i]->sample_id);
    }
  }

  const auto mapping = rules.type_mapping();
  std::vector<StageOutcome> outcomes(order.size());
  parallel_for(order.size(), workers,
               [&](std::size_t i) { outcomes[i] = process_pair(*order[i], header, rules, mapping); });

  PipelineResult res;
  res.train.header = res.validation.header = res.test.header = header;
  auto& rep = res.report;
  rep.total = order.size();
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto& o = outcomes[i];
    if (!o.rule_id) {
      rep.unmatched_ids.push_back(order[i]->sample_id);
      continue;
    }
    ++rep.matched;
    ++rep.matched_by_question_type[static_cast<std::size_t>(o.question_type)];
    if (!o.verdict.keep()) {
      ++rep.drops_by_reason[static_cast<std::size_t>(*o.verdict.drop)];
      rep.drops.push_back({order[i]->sample_id, *o.verdict.drop});
      continue;
    }
    ++rep.kept;
    switch (assign_split(o.sample->sample_id, split)) {
      case Split::kTrain: res.train.samples.push_back(std::move(*o.sample)); break;
      case Split::kValidation: res.validation.samples.push_back(std::move(*o.sample)); break;
      case Split::kTest: res.test.samples.push_back(std::move(*o.sample)); break;
    }
  }
  rep.train = res.train.samples.size();
  rep.validation = res.validation.samples.size();
  rep.test = res.test.samples.size();
  return res;
}

FilterResult filter_dataset(const core::Dataset& dataset) {
  FilterResult res;
  res.kept.header = dataset.header;
  for (const auto& s : dataset.samples) {
    const auto v = filter_sample(s);
    if (v.keep()) {
      res.kept.samples.push_back(s);
    } else {
      ++res.drops_by_reason[static_cast<std::size_t>(*v.drop)];
      res.drops.push_back({s.sample_id, *v.drop});
    }
  }
  return res;
}

json filter_report_to_json(const FilterResult& r) {
  return {{"kept", r.kept.samples.size()}, {"drops", drops_to_json(r.drops_by_reason, r.drops)}};
}

QACorpus read_qa_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open QA corpus " + path.string());
  QACorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      const json j = json::parse(line);
      if (!have_header) {
        corpus.header = core::header_from_json(j);
        have_header = true;
        continue;
      }
      QAPair qa;
      qa.sample_id = j.at("sample_id").get<std::string>();
      qa.image = core::image_from_json(j.at("image"));
      qa.question = core::tokens_from_json(j.at("question"));
      const auto& answers = j.at("answers");
      if (!answers.is_array() || answers.size() != 4) {
        throw DataError("sample " + qa.sample_id + ": exactly 4 answers required");
      }
      for (std::size_t a = 0; a < 4; ++a) qa.answers[a] = core::tokens_from_json(answers[a]);
      qa.correct_index = j.at("correct_index").get<std::size_t>();
      if (qa.correct_index > 3) {
        throw DataError("sample " + qa.sample_id + ": correct_index must be in 0..3");
      }
      if (qa.question.empty()) throw DataError("sample " + qa.sample_id + ": empty question");
      if (j.contains("labels")) {
        for (const auto& [key, value] : j.at("labels").items()) {
          qa.labels.pairs[std::stoi(key)] = value.get<std::size_t>();
        }
      } else {
        auto add = [&](const TokenList& toks) {
          for (const auto& t : toks) {
            if (const auto* p = std::get_if<core::PersonLink>(&t)) {
              if (p->link_id < 0) throw DataError("negative link id");
              qa.labels.pairs[p->link_id] = static_cast<std::size_t>(p->link_id);
            }
          }
        };
        add(qa.question);
        for (const auto& a : qa.answers) add(a);
      }
      corpus.pairs.push_back(std::move(qa));
    } catch (const json::exception& e) {
      throw DataError(where + "malformed line: " + e.what());
    } catch (const std::invalid_argument&) {
      throw DataError(where + "label key is not an integer");
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  if (!have_header) throw DataError(path.string() + ": missing header line");

  const auto fpath = core::feature_path_for(path);
  std::ifstream fin(fpath, std::ios::binary);
  if (!fin) throw DataError("cannot open feature file " + fpath.string());
  std::size_t d_vis = 0;
  auto table = core::read_features(fin, d_vis);
  if (d_vis != corpus.header.d_vis) throw DataError("feature file d_vis does not match header");
  for (auto& qa : corpus.pairs) core::attach_features(qa.sample_id, qa.image, table, d_vis);
  if (!table.empty()) throw DataError("feature file has rows not referenced by the corpus");
  return corpus;
}

void write_qa_corpus(const QACorpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write QA corpus " + path.string());
  out << core::header_to_json(corpus.header).dump() << '\n';
  std::vector<std::pair<std::string, const core::ImageRecord*>> images;
  for (const auto& qa : corpus.pairs) {
    json answers = json::array();
    for (const auto& a : qa.answers) answers.push_back(core::tokens_to_json(a));
    json labels = json::object();
    for (const auto& [id, idx] : qa.labels.pairs) labels[std::to_string(id)] = idx;
    json j = {{"sample_id", qa.sample_id},
              {"image", core::image_to_json(qa.image)},
              {"question", core::tokens_to_json(qa.question)},
              {"answers", std::move(answers)},
              {"correct_index", qa.correct_index},
              {"labels", std::move(labels)}};
    out << j.dump() << '\n';
    images.emplace_back(qa.sample_id, &qa.image);
  }
  const auto fpath = core::feature_path_for(path);
  std::ofstream fout(fpath, std::ios::binary | std::ios::trunc);
  if (!fout) throw DataError("cannot write feature file " + fpath.string());
  core::write_features(fout, corpus.header.d_vis, images);
}

}  // namespace cgg::rulekit
