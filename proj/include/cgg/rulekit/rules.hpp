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

// Declarative question/answer -> statement rewrite rules.
//
// Rules file grammar, one block per rule (blank lines and '#' comments ignored):
//
//   rule <id> priority <n> type <commonsense-type>
//   match: <pattern>
//   emit: <template>
//
// Pattern atoms:
//   word            literal, case-insensitive
//   <PERSON>        exactly one person link
//   <AUX>           one auxiliary verb (is are was were will would does did can could)
//   <REST...>       greedy wildcard span of zero or more tokens
// Any slot may be named, e.g. <PERSON:subj> or <REST:tail...>; the default
// name is the slot kind. Templates are words plus <name> placeholders; the
// reserved placeholder <ANSWER> expands to the correct answer.
//
// A trailing "?" or "." is stripped from questions, and a trailing "." from
// answers, before matching and rewriting.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cgg/core/types.hpp"

namespace cgg::rulekit {

using core::TokenList;

enum class QuestionType { kWhat, kWhose, kHow, kWhere, kWho, kWhich, kWhy, kOther };

inline constexpr std::size_t kNumQuestionTypes = 8;

std::string_view to_string(QuestionType t);

/// Question type implied by the first word of a pattern or question.
QuestionType question_type_of(std::string_view first_word);

struct PatternAtom {
  enum class Kind { kLiteral, kPerson, kAux, kRest };
  Kind kind = Kind::kLiteral;
  /// Lowercased literal text, or the capture name for slots.
  std::string text;

  bool operator==(const PatternAtom&) const = default;
};

struct TemplatePart {
  bool placeholder = false;
  /// Literal word, or placeholder name (ANSWER for the answer).
  std::string text;

  bool operator==(const TemplatePart&) const = default;
};

struct Rule {
  std::string id;
  QuestionType question_type = QuestionType::kOther;
  std::vector<PatternAtom> pattern;
  std::vector<TemplatePart> emit;
  int priority = 0;
  core::CommonsenseType commonsense_type = core::CommonsenseType::kOther;

  bool operator==(const Rule&) const = default;
};

/// Rules kept in descending priority; equal priorities keep file order.
class RuleSet {
 public:
  RuleSet() = default;
  /// Throws DataError on duplicate ids or templates that reference unknown
  /// captures.
  explicit RuleSet(std::vector<Rule> rules);

  const std::vector<Rule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }
  std::size_t size() const { return rules_.size(); }
  const Rule* find(std::string_view id) const;

  /// rule id -> commonsense type.
  std::map<std::string, core::CommonsenseType> type_mapping() const;

 private:
  std::vector<Rule> rules_;
};

/// Parses the rules file format. Errors carry the line number.
RuleSet parse_rules(std::string_view text);
RuleSet load_rules(const std::string& path);
std::string format_rules(const RuleSet& rules);

/// The shipped rule set covering what/whose/how/where/who/which/why questions.
const RuleSet& default_rules();
std::string_view default_rules_text();

struct QAPair {
  std::string sample_id;
  TokenList question;
  std::array<TokenList, 4> answers;
  std::size_t correct_index = 0;
  core::ImageRecord image;
  /// link id -> person index for every link in the question and answers.
  core::GroundingLabel labels;
};

/// Captured spans by lowercased capture name.
using Captures = std::map<std::string, TokenList>;

/// Captures if `rule` matches the question of `qa`.
std::optional<Captures> match_pattern(const Rule& rule, const TokenList& question);

/// Id of the highest-priority rule whose pattern matches, or nullopt.
std::optional<std::string> match_rule(const QAPair& qa, const RuleSet& rules);

/// Rewrites the question/answer pair with `rule`. Throws DataError if the rule
/// does not match or the template names an unbound placeholder.
TokenList transform(const QAPair& qa, const Rule& rule);

}  // namespace cgg::rulekit
