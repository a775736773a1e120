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

#include "cgg/core/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "cgg/core/error.hpp"

namespace cgg::core {

namespace {

constexpr std::array<std::string_view, kNumCommonsenseTypes> kTypeNames = {
    "Causal", "Activity", "Temporal", "Mental", "Spatial", "Attribute", "Other"};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string render_tokens(const TokenList& tokens) {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out += ' ';
    if (const auto* w = std::get_if<Word>(&token)) {
      out += w->text;
    } else if (const auto* p = std::get_if<PersonLink>(&token)) {
      out += "PERSON" + std::to_string(p->link_id);
    } else {
      const auto& o = std::get<ObjectLink>(token);
      out += "[" + o.class_name + "#" + std::to_string(o.region_id) + "]";
    }
  }
  return out;
}

std::size_t Description::num_links() const {
  return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(), is_person));
}

std::vector<int> Description::distinct_links() const {
  std::vector<int> out;
  for (const auto& t : tokens) {
    if (const auto* p = std::get_if<PersonLink>(&t)) {
      if (std::find(out.begin(), out.end(), p->link_id) == out.end()) out.push_back(p->link_id);
    }
  }
  return out;
}

std::vector<int> Description::link_sequence() const {
  std::vector<int> out;
  for (const auto& t : tokens) {
    if (const auto* p = std::get_if<PersonLink>(&t)) out.push_back(p->link_id);
  }
  return out;
}

std::string_view to_string(CommonsenseType t) {
  return kTypeNames[static_cast<std::size_t>(t)];
}

CommonsenseType parse_commonsense_type(std::string_view name) {
  for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
    if (iequals(name, kTypeNames[i])) return static_cast<CommonsenseType>(i);
  }
  throw DataError("unknown commonsense type '" + std::string(name) + "'");
}

std::vector<CommonsenseType> all_commonsense_types() {
  std::vector<CommonsenseType> out;
  for (std::size_t i = 0; i < kNumCommonsenseTypes; ++i) {
    out.push_back(static_cast<CommonsenseType>(i));
  }
  return out;
}

std::size_t argmax_lowest(const std::vector<double>& scores) {
  if (scores.empty()) throw UsageError("argmax of an empty score vector");
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] > scores[best]) best = j;
  }
  return best;
}

}  // namespace cgg::core
