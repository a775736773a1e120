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

#include "cgg/core/validate.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "cgg/core/error.hpp"

namespace cgg::core {

namespace {

bool is_conjunction(const Token& t) {
  const auto* w = std::get_if<Word>(&t);
  if (w == nullptr) return false;
  std::string lower;
  for (char c : w->text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower == "and" || lower == "or";
}

std::optional<std::string> check_box(const BoundingBox& b, const ImageRecord& image,
                                     const std::string& what) {
  if (!std::isfinite(b.x1) || !std::isfinite(b.y1) || !std::isfinite(b.x2) ||
      !std::isfinite(b.y2)) {
    return what + ": non-finite coordinate";
  }
  if (!(b.x2 > b.x1) || !(b.y2 > b.y1)) return what + ": degenerate box";
  if (b.x1 < 0 || b.y1 < 0) return what + ": negative coordinate";
  if (b.x2 > image.width || b.y2 > image.height) return what + ": box exceeds image bounds";
  return std::nullopt;
}

std::optional<std::string> check_feature(const std::vector<float>& f, std::size_t d_vis,
                                         const std::string& what) {
  if (f.size() != d_vis) {
    return what + ": feature dimension mismatch (expected " + std::to_string(d_vis) + ", got " +
           std::to_string(f.size()) + ")";
  }
  for (float v : f) {
    if (!std::isfinite(v)) return what + ": non-finite feature value";
  }
  return std::nullopt;
}

}  // namespace

bool has_tied_links(const TokenList& tokens) {
  for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
    if (is_person(tokens[i]) && is_conjunction(tokens[i + 1]) && is_person(tokens[i + 2])) {
      return true;
    }
  }
  return false;
}

std::optional<std::string> check_sample(const Sample& s, const DatasetHeader& header,
                                        Validation level) {
  const auto& img = s.image;
  if (s.sample_id.empty()) return "empty sample_id";
  if (img.width <= 0 || img.height <= 0) return "image size must be positive";
  for (std::size_t i = 0; i < img.persons.size(); ++i) {
    const auto& p = img.persons[i];
    const std::string what = "person " + std::to_string(i);
    if (p.index != i) return what + ": person indices must be consecutive from 0";
    if (auto e = check_box(p.box, img, what)) return e;
    if (auto e = check_feature(p.feature, header.d_vis, what)) return e;
  }
  if (img.context_objects.size() > header.max_context_objects) {
    return "too many context objects (" + std::to_string(img.context_objects.size()) + " > " +
           std::to_string(header.max_context_objects) + ")";
  }
  for (std::size_t i = 0; i < img.context_objects.size(); ++i) {
    const auto& c = img.context_objects[i];
    const std::string what = "context object " + std::to_string(i);
    if (auto e = check_box(c.box, img, what)) return e;
    if (auto e = check_feature(c.feature, header.d_vis, what)) return e;
    if (!(c.objectness >= 0.0 && c.objectness <= 1.0)) return what + ": objectness outside [0,1]";
    if (c.objectness < header.objectness_threshold) {
      return what + ": objectness below threshold";
    }
    if (c.class_name.empty()) return what + ": empty class_name";
  }

  std::set<int> links;
  for (const auto& t : s.description.tokens) {
    if (const auto* w = std::get_if<Word>(&t)) {
      if (w->text.empty()) return "empty word token";
    } else if (const auto* p = std::get_if<PersonLink>(&t)) {
      links.insert(p->link_id);
    } else if (level == Validation::kFinished) {
      return "object link in finished sample";
    }
  }
  for (int id : links) {
    auto it = s.labels.pairs.find(id);
    if (it == s.labels.pairs.end()) return "missing label for link " + std::to_string(id);
    if (it->second >= img.persons.size()) {
      return "label out of range (link " + std::to_string(id) + " -> " +
             std::to_string(it->second) + ", N=" + std::to_string(img.persons.size()) + ")";
    }
  }
  for (const auto& [id, idx] : s.labels.pairs) {
    if (!links.contains(id)) return "label for absent link " + std::to_string(id);
  }

  if (level == Validation::kFinished) {
    if (links.empty()) return "no person link";
    if (img.persons.size() < kMinPersons) return "fewer than 2 candidate persons";
    if (img.persons.size() > kMaxPersons) return "more than 10 candidate persons";
    if (has_tied_links(s.description.tokens)) return "tied person links";
  }
  return std::nullopt;
}

void validate_sample(const Sample& sample, const DatasetHeader& header, Validation level) {
  if (auto err = check_sample(sample, header, level)) {
    throw DataError("sample " + sample.sample_id + ": " + *err);
  }
}

}  // namespace cgg::core
