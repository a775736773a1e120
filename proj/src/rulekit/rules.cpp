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

#include "cgg/rulekit/rules.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "cgg/core/error.hpp"

namespace cgg::rulekit {

namespace {

constexpr std::array<std::string_view, kNumQuestionTypes> kQuestionTypeNames = {
    "what", "whose", "how", "where", "who", "which", "why", "other"};

constexpr std::array<std::string_view, 10> kAuxiliaries = {
    "is", "are", "was", "were", "will", "would", "does", "did", "can", "could"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(std::string_view s) {
  std::istringstream is{std::string(s)};
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

bool is_aux(const core::Token& t) {
  const auto* w = std::get_if<core::Word>(&t);
  if (w == nullptr) return false;
  const auto l = lower(w->text);
  return std::find(kAuxiliaries.begin(), kAuxiliaries.end(), l) != kAuxiliaries.end();
}

bool is_terminal_punct(const core::Token& t, bool allow_question_mark) {
  const auto* w = std::get_if<core::Word>(&t);
  if (w == nullptr) return false;
  return w->text == "." || (allow_question_mark && w->text == "?");
}

TokenList strip_trailing(TokenList tokens, bool allow_question_mark) {
  while (!tokens.empty() && is_terminal_punct(tokens.back(), allow_question_mark)) {
    tokens.pop_back();
  }
  return tokens;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw DataError("rules line " + std::to_string(line) + ": " + msg);
}

PatternAtom parse_atom(const std::string& word, std::size_t line) {
  if (word.size() < 2 || word.front() != '<' || word.back() != '>') {
    return {PatternAtom::Kind::kLiteral, lower(word)};
  }
  std::string inner = word.substr(1, word.size() - 2);
  bool ellipsis = false;
  if (inner.size() >= 3 && inner.compare(inner.size() - 3, 3, "...") == 0) {
    ellipsis = true;
    inner.resize(inner.size() - 3);
  }
  std::string kind = inner;
  std::string name;
  if (auto colon = inner.find(':'); colon != std::string::npos) {
    kind = inner.substr(0, colon);
    name = inner.substr(colon + 1);
    if (name.empty()) fail(line, "empty capture name in " + word);
  }
  kind = lower(kind);
  PatternAtom atom;
  if (kind == "person") {
    atom.kind = PatternAtom::Kind::kPerson;
  } else if (kind == "aux") {
    atom.kind = PatternAtom::Kind::kAux;
  } else if (kind == "rest") {
    atom.kind = PatternAtom::Kind::kRest;
    if (!ellipsis) fail(line, "wildcard slot must be written <REST...>");
  } else {
    fail(line, "unknown slot kind in " + word);
  }
  if (ellipsis && atom.kind != PatternAtom::Kind::kRest) fail(line, "only REST takes '...'");
  atom.text = lower(name.empty() ? kind : name);
  if (atom.text == "answer") fail(line, "capture name 'answer' is reserved");
  return atom;
}

TemplatePart parse_template_part(const std::string& word) {
  if (word.size() >= 3 && word.front() == '<' && word.back() == '>') {
    return {true, lower(word.substr(1, word.size() - 2))};
  }
  return {false, word};
}

void validate_rule(const Rule& rule) {
  std::set<std::string> names;
  for (const auto& a : rule.pattern) {
    if (a.kind == PatternAtom::Kind::kLiteral) continue;
    if (!names.insert(a.text).second) {
      throw DataError("rule " + rule.id + ": duplicate capture name '" + a.text + "'");
    }
  }
  if (rule.pattern.empty()) throw DataError("rule " + rule.id + ": empty pattern");
  if (rule.emit.empty()) throw DataError("rule " + rule.id + ": empty template");
  for (const auto& p : rule.emit) {
    if (p.placeholder && p.text != "answer" && !names.contains(p.text)) {
      throw DataError("rule " + rule.id + ": template placeholder <" + p.text +
                      "> names no captured span");
    }
  }
}

bool match_from(const std::vector<PatternAtom>& pattern, std::size_t ai, const TokenList& toks,
                std::size_t ti, Captures& caps) {
  if (ai == pattern.size()) return ti == toks.size();
  const auto& atom = pattern[ai];
  switch (atom.kind) {
    case PatternAtom::Kind::kLiteral: {
      if (ti >= toks.size()) return false;
      const auto* w = std::get_if<core::Word>(&toks[ti]);
      if (w == nullptr || lower(w->text) != atom.text) return false;
      return match_from(pattern, ai + 1, toks, ti + 1, caps);
    }
    case PatternAtom::Kind::kPerson:
    case PatternAtom::Kind::kAux: {
      if (ti >= toks.size()) return false;
      const bool ok = atom.kind == PatternAtom::Kind::kPerson ? core::is_person(toks[ti])
                                                               : is_aux(toks[ti]);
      if (!ok) return false;
      caps[atom.text] = TokenList{toks[ti]};
      if (match_from(pattern, ai + 1, toks, ti + 1, caps)) return true;
      caps.erase(atom.text);
      return false;
    }
    case PatternAtom::Kind::kRest: {
      for (std::size_t end = toks.size() + 1; end-- > ti;) {
        caps[atom.text] = TokenList(toks.begin() + static_cast<std::ptrdiff_t>(ti),
                                    toks.begin() + static_cast<std::ptrdiff_t>(end));
        if (match_from(pattern, ai + 1, toks, end, caps)) return true;
      }
      caps.erase(atom.text);
      return false;
    }
  }
  return false;
}

// Specific shapes carry higher priorities than the general rule of the same
// question word.
constexpr std::string_view kDefaultRules = R"(# Default question -> statement rewrite rules.
rule why_aux priority 10 type Causal
match: why <AUX> <PERSON> <REST...>
emit: <PERSON> <AUX> <REST> because <ANSWER>

rule why_general priority 5 type Causal
match: why <REST...>
emit: <REST> because <ANSWER>

rule what_doing priority 30 type Activity
match: what <AUX> <PERSON> doing
emit: <ANSWER>

rule what_doing_before priority 35 type Temporal
match: what <AUX> <PERSON> doing before <REST...>
emit: <ANSWER> before <REST>

rule what_next priority 30 type Temporal
match: what will <PERSON> do <REST...>
emit: <ANSWER>

rule what_think priority 30 type Mental
match: what <AUX> <PERSON> thinking <REST...>
emit: <PERSON> <AUX> thinking <ANSWER>

rule what_want priority 30 type Mental
match: what does <PERSON> want <REST...>
emit: <PERSON> wants <ANSWER>

rule what_general priority 1 type Other
match: what <REST...>
emit: <ANSWER>

rule how_feel priority 30 type Mental
match: how <AUX> <PERSON> feeling <REST...>
emit: <PERSON> <AUX> feeling <ANSWER>

rule how_general priority 10 type Activity
match: how <AUX> <PERSON> <REST...>
emit: <PERSON> <AUX> <REST> by <ANSWER>

rule where_go priority 30 type Spatial
match: where will <PERSON> go
emit: <PERSON> will go <ANSWER>

rule where_general priority 10 type Spatial
match: where <AUX> <PERSON> <REST...>
emit: <PERSON> <AUX> <REST> <ANSWER>

rule who_general priority 10 type Other
match: who <REST...>
emit: <ANSWER>

rule whose_general priority 10 type Attribute
match: whose <REST...>
emit: <ANSWER>

rule which_general priority 10 type Other
match: which <REST...>
emit: <ANSWER>
)";

}  // namespace

std::string_view to_string(QuestionType t) { return kQuestionTypeNames[static_cast<std::size_t>(t)]; }

QuestionType question_type_of(std::string_view first_word) {
  const auto l = lower(first_word);
  for (std::size_t i = 0; i + 1 < kQuestionTypeNames.size(); ++i) {
    if (l == kQuestionTypeNames[i]) return static_cast<QuestionType>(i);
  }
  return QuestionType::kOther;
}

RuleSet::RuleSet(std::vector<Rule> rules) : rules_(std::move(rules)) {
  std::set<std::string> ids;
  for (const auto& r : rules_) {
    if (!ids.insert(r.id).second) throw DataError("duplicate rule id '" + r.id + "'");
    validate_rule(r);
  }
  std::stable_sort(rules_.begin(), rules_.end(),
                   [](const Rule& a, const Rule& b) { return a.priority > b.priority; });
}

const Rule* RuleSet::find(std::string_view id) const {
  for (const auto& r : rules_) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::map<std::string, core::CommonsenseType> RuleSet::type_mapping() const {
  std::map<std::string, core::CommonsenseType> out;
  for (const auto& r : rules_) out[r.id] = r.commonsense_type;
  return out;
}

RuleSet parse_rules(std::string_view text) {
  std::vector<Rule> rules;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  // Index into `rules`; a pointer would dangle when the vector grows.
  std::optional<std::size_t> current;
  bool has_match = false;
  bool has_emit = false;
  std::size_t current_line = 0;
  auto finish = [&]() {
    if (!current) return;
    if (!has_match) fail(current_line, "rule " + rules[*current].id + " has no match: line");
    if (!has_emit) fail(current_line, "rule " + rules[*current].id + " has no emit: line");
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.rfind("match:", 0) == 0 || line.rfind("emit:", 0) == 0) {
      if (!current) fail(line_no, "'" + line + "' outside a rule block");
      Rule& rule = rules[*current];
      const bool is_match = line.front() == 'm';
      const auto words = split_ws(line.substr(is_match ? 6 : 5));
      if (words.empty()) fail(line_no, "empty pattern or template");
      if (is_match) {
        if (has_match) fail(line_no, "second match: line in rule " + rule.id);
        for (const auto& w : words) rule.pattern.push_back(parse_atom(w, line_no));
        rule.question_type = rule.pattern.front().kind == PatternAtom::Kind::kLiteral
                                 ? question_type_of(rule.pattern.front().text)
                                 : QuestionType::kOther;
        has_match = true;
      } else {
        if (has_emit) fail(line_no, "second emit: line in rule " + rule.id);
        for (const auto& w : words) rule.emit.push_back(parse_template_part(w));
        has_emit = true;
      }
      continue;
    }
    const auto words = split_ws(line);
    if (words.size() == 6 && words[0] == "rule" && words[2] == "priority" && words[4] == "type") {
      finish();
      Rule r;
      r.id = words[1];
      try {
        std::size_t used = 0;
        r.priority = std::stoi(words[3], &used);
        if (used != words[3].size()) throw std::invalid_argument(words[3]);
      } catch (const std::exception&) {
        fail(line_no, "priority '" + words[3] + "' is not an integer");
      }
      try {
        r.commonsense_type = core::parse_commonsense_type(words[5]);
      } catch (const DataError& e) {
        fail(line_no, e.what());
      }
      rules.push_back(std::move(r));
      current = rules.size() - 1;
      current_line = line_no;
      has_match = has_emit = false;
      continue;
    }
    fail(line_no, "expected 'rule <id> priority <n> type <type>', 'match:' or 'emit:'");
  }
  finish();
  return RuleSet(std::move(rules));
}

RuleSet load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rules file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_rules(ss.str());
}

std::string format_rules(const RuleSet& rules) {
  std::ostringstream os;
  for (const auto& r : rules.rules()) {
    os << "rule " << r.id << " priority " << r.priority << " type "
       << core::to_string(r.commonsense_type) << "\nmatch:";
    for (const auto& a : r.pattern) {
      switch (a.kind) {
        case PatternAtom::Kind::kLiteral: os << ' ' << a.text; break;
        case PatternAtom::Kind::kPerson: os << " <PERSON:" << a.text << '>'; break;
        case PatternAtom::Kind::kAux: os << " <AUX:" << a.text << '>'; break;
        case PatternAtom::Kind::kRest: os << " <REST:" << a.text << "...>"; break;
      }
    }
    os << "\nemit:";
    for (const auto& p : r.emit) {
      if (p.placeholder) {
        os << " <" << p.text << '>';
      } else {
        os << ' ' << p.text;
      }
    }
    os << "\n\n";
  }
  return os.str();
}

std::string_view default_rules_text() { return kDefaultRules; }

const RuleSet& default_rules() {
  static const RuleSet rules = parse_rules(kDefaultRules);
  return rules;
}

std::optional<Captures> match_pattern(const Rule& rule, const TokenList& question) {
  const TokenList q = strip_trailing(question, true);
  Captures caps;
  if (match_from(rule.pattern, 0, q, 0, caps)) return caps;
  return std::nullopt;
}

std::optional<std::string> match_rule(const QAPair& qa, const RuleSet& rules) {
  for (const auto& r : rules.rules()) {
    if (match_pattern(r, qa.question)) return r.id;
  }
  return std::nullopt;
}

TokenList transform(const QAPair& qa, const Rule& rule) {
  auto caps = match_pattern(rule, qa.question);
  if (!caps) throw DataError("sample " + qa.sample_id + ": rule " + rule.id + " does not match");
  if (qa.correct_index >= qa.answers.size()) {
    throw DataError("sample " + qa.sample_id + ": correct_index out of range");
  }
  const TokenList answer = strip_trailing(qa.answers[qa.correct_index], false);
  TokenList out;
  for (const auto& part : rule.emit) {
    if (!part.placeholder) {
      out.push_back(core::Word{part.text});
      continue;
    }
    if (part.text == "answer") {
      out.insert(out.end(), answer.begin(), answer.end());
      continue;
    }
    auto it = caps->find(part.text);
    if (it == caps->end()) {
      throw DataError("rule " + rule.id + ": unbound template placeholder <" + part.text + ">");
    }
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

}  // namespace cgg::rulekit
