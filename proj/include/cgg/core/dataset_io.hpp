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

// On-disk dataset format.
//
// A dataset is a pair of files:
//   <name>.jsonl  UTF-8 JSON lines. Line 1 is the header
//                 {format_version, d_vis, objectness_threshold, max_context_objects};
//                 every further line is one sample.
//   <name>.cgf    Region features, little-endian:
//                 "CGF1", u32 d_vis, then per region in file order
//                 u32 len, sample_id bytes, u32 region ordinal, d_vis x f32.
// Region ordinals are 0..N-1 for persons followed by N..N+M-1 for context
// objects.

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgg/core/types.hpp"
#include "cgg/core/validate.hpp"

namespace cgg::core {

inline constexpr char kFeatureMagic[4] = {'C', 'G', 'F', '1'};

/// `foo/bar.jsonl` -> `foo/bar.cgf`.
std::filesystem::path feature_path_for(const std::filesystem::path& dataset_path);

nlohmann::json token_to_json(const Token& token);
Token token_from_json(const nlohmann::json& j);
nlohmann::json tokens_to_json(const TokenList& tokens);
TokenList tokens_from_json(const nlohmann::json& j);

nlohmann::json header_to_json(const DatasetHeader& header);
DatasetHeader header_from_json(const nlohmann::json& j);

/// Region geometry, tokens, labels; features are not part of the JSON record.
nlohmann::json image_to_json(const ImageRecord& image);
ImageRecord image_from_json(const nlohmann::json& j);
nlohmann::json sample_to_json(const Sample& sample);
Sample sample_from_json(const nlohmann::json& j);

/// Features keyed by (sample_id, region ordinal).
using FeatureTable = std::map<std::pair<std::string, std::uint32_t>, std::vector<float>>;

void write_features(std::ostream& out, std::size_t d_vis,
                    const std::vector<std::pair<std::string, const ImageRecord*>>& images);
/// Reads a whole feature file. Throws DataError on bad magic, truncation, or
/// duplicate keys.
FeatureTable read_features(std::istream& in, std::size_t& d_vis_out);

/// Moves rows from `table` into the image's regions. Throws DataError naming
/// the region on missing rows or length mismatch.
void attach_features(const std::string& sample_id, ImageRecord& image, FeatureTable& table,
                     std::size_t d_vis);

Dataset read_dataset(const std::filesystem::path& path,
                     Validation level = Validation::kFinished);
/// Validates every sample first; nothing is written if any sample is invalid.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path,
                   Validation level = Validation::kFinished);

}  // namespace cgg::core
