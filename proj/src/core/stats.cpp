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

#include "cgg/core/stats.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace cgg::core {

DatasetStats dataset_stats(const std::vector<Sample>& samples) {
  DatasetStats st;
  st.num_samples = samples.size();
  if (samples.empty()) return st;

  // Records of one image normally carry the same boxes; taking the largest
  // count keeps the result independent of sample order when they do not.
  std::map<std::string, std::size_t> persons_by_image;
  std::size_t tokens = 0;
  for (const auto& s : samples) {
    auto& n = persons_by_image[s.image.image_id];
    n = std::max(n, s.image.persons.size());
    tokens += s.description.tokens.size();
    st.num_links += s.description.num_links();
    std::set<std::size_t> targets;
    for (const auto& [id, idx] : s.labels.pairs) targets.insert(idx);
    st.num_grounded_persons += targets.size();
    ++st.type_histogram[static_cast<std::size_t>(s.commonsense_type)];
  }
  st.num_images = persons_by_image.size();
  std::size_t persons = 0;
  for (const auto& [id, n] : persons_by_image) persons += n;

  const double n = static_cast<double>(samples.size());
  st.mean_tokens_per_description = static_cast<double>(tokens) / n;
  st.mean_links_per_description = static_cast<double>(st.num_links) / n;
  st.mean_persons_per_description = static_cast<double>(st.num_grounded_persons) / n;
  st.mean_persons_per_image = static_cast<double>(persons) / static_cast<double>(st.num_images);
  return st;
}

nlohmann::json stats_to_json(const DatasetStats& st) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json hist = nlohmann::json::object();
  for (auto t : all_commonsense_types()) {
    hist[std::string(to_string(t))] = st.type_histogram[static_cast<std::size_t>(t)];
  }
  return {{"num_samples", st.num_samples},
          {"num_images", st.num_images},
          {"num_grounded_persons", st.num_grounded_persons},
          {"num_links", st.num_links},
          {"mean_tokens_per_description", opt(st.mean_tokens_per_description)},
          {"mean_persons_per_image", opt(st.mean_persons_per_image)},
          {"mean_links_per_description", opt(st.mean_links_per_description)},
          {"mean_persons_per_description", opt(st.mean_persons_per_description)},
          {"commonsense_types", std::move(hist)}};
}

}  // namespace cgg::core
