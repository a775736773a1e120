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


#include "cgg/grounder/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "cgg/core/error.hpp"

namespace cgg::grounder {

namespace {

std::uint64_t name_stream_seed(const std::string& sample_id, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ull ^ seed;
  for (unsigned char c : sample_id) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string w; in >> w;) {
    for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(std::move(w));
  }
  return out;
}

Vocab::Vocab() { add(kUnknownWord); }

std::size_t Vocab::add(const std::string& word) {
  if (auto it = ids_.find(word); it != ids_.end()) return it->second;
  words_.push_back(word);
  ids_[word] = words_.size() - 1;
  return words_.size() - 1;
}

std::size_t Vocab::id_of(const std::string& word) const {
  auto it = ids_.find(word);
  return it == ids_.end() ? kUnknown : it->second;
}

Vocab Vocab::build(const std::vector<core::Sample>& samples, const std::vector<std::string>& names) {
  std::set<std::string> words;
  for (const auto& s : samples) {
    for (const auto& t : s.description.tokens) {
      if (const auto* w = std::get_if<core::Word>(&t)) {
        for (auto& x : tokenize(w->text)) words.insert(std::move(x));
      } else if (const auto* o = std::get_if<core::ObjectLink>(&t)) {
        for (auto& x : tokenize(o->class_name)) words.insert(std::move(x));
      }
    }
  }
  for (const auto& n : names) {
    for (auto& x : tokenize(n)) words.insert(std::move(x));
  }
  words.erase(kUnknownWord);
  Vocab v;
  for (const auto& w : words) v.add(w);
  return v;
}

void Vocab::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write vocabulary " + path);
  for (const auto& w : words_) out << w << '\n';
  if (!out) throw DataError("failed writing vocabulary " + path);
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary " + path);
  Vocab v;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (n == 1) {
      if (line != kUnknownWord) throw DataError("vocabulary " + path + ": missing unknown marker");
      continue;
    }
    if (line.empty() || line.find_first_of(" \t") != std::string::npos || v.contains(line)) {
      throw DataError("vocabulary " + path + ": bad entry on line " + std::to_string(n));
    }
    v.add(line);
  }
  if (n == 0) throw DataError("vocabulary " + path + " is empty");
  return v;
}

NamedText substitute_neutral_names(const core::Description& description,
                                   const std::vector<std::string>& pool, const std::string& sample_id,
                                   std::uint64_t seed) {
  NamedText out;
  out.link_ids = description.distinct_links();
  if (out.link_ids.size() > pool.size()) {
    throw UsageError("sample " + sample_id + ": " + std::to_string(out.link_ids.size()) +
                     " person links but only " + std::to_string(pool.size()) + " neutral names");
  }
  // Partial Fisher-Yates over pool indices.
  std::mt19937_64 rng(name_stream_seed(sample_id, seed));
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < out.link_ids.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
    std::swap(idx[i], idx[j]);
    out.names[out.link_ids[i]] = pool[idx[i]];
  }
  std::map<int, std::size_t> first_pos;
  for (const auto& t : description.tokens) {
    std::vector<std::string> words;
    if (const auto* w = std::get_if<core::Word>(&t)) {
      words = tokenize(w->text);
    } else if (const auto* p = std::get_if<core::PersonLink>(&t)) {
      words = tokenize(out.names.at(p->link_id));
      first_pos.emplace(p->link_id, out.words.size());
    } else {
      words = tokenize(std::get<core::ObjectLink>(t).class_name);
    }
    for (auto& w : words) out.words.push_back(std::move(w));
  }
  for (int id : out.link_ids) out.link_positions.push_back(first_pos.at(id));
  return out;
}

}  // namespace cgg::grounder
