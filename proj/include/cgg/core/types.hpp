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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cgg::core {

/// Axis-aligned box in pixel space. Coordinates are treated as reals, so the
/// box covers [x1, x2) x [y1, y2) and its area is (x2 - x1) * (y2 - y1).
struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }

  bool operator==(const BoundingBox&) const = default;
};

struct PersonBox {
  std::size_t index = 0;
  BoundingBox box;
  std::vector<float> feature;

  bool operator==(const PersonBox&) const = default;
};

struct ContextObject {
  BoundingBox box;
  std::vector<float> feature;
  double objectness = 1.0;
  std::string class_name;

  bool operator==(const ContextObject&) const = default;
};

struct ImageRecord {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<PersonBox> persons;
  std::vector<ContextObject> context_objects;

  std::size_t num_persons() const { return persons.size(); }
  std::size_t num_regions() const { return persons.size() + context_objects.size(); }

  bool operator==(const ImageRecord&) const = default;
};

struct Word {
  std::string text;
  bool operator==(const Word&) const = default;
};

struct PersonLink {
  int link_id = 0;
  bool operator==(const PersonLink&) const = default;
};

/// Reference to a detected object region. Only exists before object links are
/// replaced by their class names.
struct ObjectLink {
  int region_id = 0;
  std::string class_name;
  bool operator==(const ObjectLink&) const = default;
};

using Token = std::variant<Word, PersonLink, ObjectLink>;
using TokenList = std::vector<Token>;

inline bool is_word(const Token& t) { return std::holds_alternative<Word>(t); }
inline bool is_person(const Token& t) { return std::holds_alternative<PersonLink>(t); }
inline bool is_object(const Token& t) { return std::holds_alternative<ObjectLink>(t); }

/// Space-separated rendering; person links render as PERSON<id>.
std::string render_tokens(const TokenList& tokens);

struct Description {
  TokenList tokens;

  /// Number of PersonLink tokens (k).
  std::size_t num_links() const;
  /// Link ids in order of first appearance.
  std::vector<int> distinct_links() const;
  /// Link ids of every PersonLink token, in token order (length k).
  std::vector<int> link_sequence() const;

  bool operator==(const Description&) const = default;
};

/// link_id -> person index.
struct GroundingLabel {
  std::map<int, std::size_t> pairs;
  bool operator==(const GroundingLabel&) const = default;
};

enum class CommonsenseType { kCausal, kActivity, kTemporal, kMental, kSpatial, kAttribute, kOther };

inline constexpr std::size_t kNumCommonsenseTypes = 7;

std::string_view to_string(CommonsenseType t);
/// Case-insensitive; throws DataError on unknown names.
CommonsenseType parse_commonsense_type(std::string_view name);
std::vector<CommonsenseType> all_commonsense_types();

struct Sample {
  std::string sample_id;
  ImageRecord image;
  Description description;
  GroundingLabel labels;
  CommonsenseType commonsense_type = CommonsenseType::kOther;

  bool operator==(const Sample&) const = default;
};

/// Per-link scores over candidate boxes plus the argmax choice.
struct LinkPrediction {
  int link_id = 0;
  std::vector<double> scores;
  std::size_t chosen = 0;
};

struct Prediction {
  std::vector<LinkPrediction> links;
};

/// Index of the maximum, lowest index on ties. Requires non-empty input.
std::size_t argmax_lowest(const std::vector<double>& scores);

/// Structural limits declared by a dataset file header.
struct DatasetHeader {
  int format_version = 1;
  std::size_t d_vis = 0;
  double objectness_threshold = 0.2;
  std::size_t max_context_objects = 100;

  bool operator==(const DatasetHeader&) const = default;
};

struct Dataset {
  DatasetHeader header;
  std::vector<Sample> samples;

  bool operator==(const Dataset&) const = default;
};

inline constexpr std::size_t kMinPersons = 2;
inline constexpr std::size_t kMaxPersons = 10;

}  // namespace cgg::core
