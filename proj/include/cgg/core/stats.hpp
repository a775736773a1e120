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
#include <cstddef>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgg/core/types.hpp"

namespace cgg::core {

struct DatasetStats {
  std::size_t num_samples = 0;
  std::size_t num_images = 0;
  /// Distinct (sample, person) targets across all descriptions.
  std::size_t num_grounded_persons = 0;
  std::size_t num_links = 0;
  std::optional<double> mean_tokens_per_description;
  /// Averaged over distinct image ids.
  std::optional<double> mean_persons_per_image;
  std::optional<double> mean_links_per_description;
  /// Distinct persons mentioned per description.
  std::optional<double> mean_persons_per_description;
  std::array<std::size_t, kNumCommonsenseTypes> type_histogram{};

  bool operator==(const DatasetStats&) const = default;
};

DatasetStats dataset_stats(const std::vector<Sample>& samples);

nlohmann::json stats_to_json(const DatasetStats& stats);

}  // namespace cgg::core
