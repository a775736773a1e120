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


// Word vocabulary and neutral-name substitution.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cgg/core/types.hpp"

namespace cgg::grounder {

/// Whitespace split plus ASCII lowercasing.
std::vector<std::string> tokenize(const std::string& text);

/// Id 0 is reserved for unknown words.
class Vocab {
 public:
  static constexpr std::size_t kUnknown = 0;
  static constexpr const char* kUnknownWord = "<unk>";

  Vocab();
  /// Words of every description plus the name pool, sorted.
  static Vocab build(const std::vector<core::Sample>& samples, const std::vector<std::string>& names);

  std::size_t add(const std::string& word);
  std::size_t id_of(const std::string& word) const;
  bool contains(const std::string& word) const { return ids_.contains(word); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  /// One word per line, the unknown marker first.
  void save(const std::string& path) const;
  /// Throws DataError on a malformed file.
  static Vocab load(const std::string& path);

  bool operator==(const Vocab& o) const { return words_ == o.words_; }

 private:
  std::vector<std::string> words_;
  std::map<std::string, std::size_t> ids_;
};

struct NamedText {
  std::vector<std::string> words;
  /// Distinct link ids in order of first appearance.
  std::vector<int> link_ids;
  /// Word position of each link's first occurrence (first word of its name).
  std::vector<std::size_t> link_positions;
  /// Name chosen for each link.
  std::map<int, std::string> names;
};

/// Replaces every person link with a name drawn without replacement from
/// `pool`; the draw is a function of (sample_id, seed). Throws UsageError if
/// the pool has fewer names than the description has distinct links.
NamedText substitute_neutral_names(const core::Description& description,
                                   const std::vector<std::string>& pool, const std::string& sample_id,
                                   std::uint64_t seed);

}  // namespace cgg::grounder
