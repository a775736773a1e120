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


#include "cgg/benchkit/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "cgg/core/error.hpp"

namespace cgg::bench {

namespace {

Assignment assign_in_order(const core::Sample& sample, const std::vector<std::size_t>& candidates) {
  Assignment out;
  const auto links = sample.description.distinct_links();
  if (candidates.empty()) return out;
  for (std::size_t i = 0; i < links.size(); ++i) out[links[i]] = candidates[i % candidates.size()];
  return out;
}

std::vector<std::size_t> by_decreasing_area(const core::Sample& sample) {
  const auto& persons = sample.image.persons;
  std::vector<std::size_t> idx(persons.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return persons[a].box.area() > persons[b].box.area();
  });
  return idx;
}

std::uint64_t sample_seed(const std::string& sample_id, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : sample_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Assignment baseline_random(const core::Sample& sample, std::uint64_t seed) {
  Assignment out;
  const std::size_t n = sample.image.persons.size();
  if (n == 0) return out;
  std::mt19937_64 rng(sample_seed(sample.sample_id, seed));
  for (int link : sample.description.distinct_links()) {
    out[link] = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }
  return out;
}

Assignment baseline_big_to_small(const core::Sample& sample) {
  return assign_in_order(sample, by_decreasing_area(sample));
}

Assignment baseline_left_to_right(const core::Sample& sample, bool top_k_only) {
  std::vector<std::size_t> cand = by_decreasing_area(sample);
  if (top_k_only) cand.resize(std::min(cand.size(), sample.description.distinct_links().size()));
  const auto& persons = sample.image.persons;
  std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = persons[a].box;
    const auto& pb = persons[b].box;
    if (pa.x1 != pb.x1) return pa.x1 < pb.x1;
    if (pa.y1 != pb.y1) return pa.y1 < pb.y1;
    return a < b;
  });
  return assign_in_order(sample, cand);
}

std::string_view to_string(Baseline b) {
  switch (b) {
    case Baseline::kRandom: return "random";
    case Baseline::kBigToSmall: return "big_to_small";
    case Baseline::kLeftToRight: return "left_to_right";
    case Baseline::kLeftToRightTopK: return "left_to_right_topk";
  }
  return "?";
}

const std::vector<Baseline>& all_baselines() {
  static const std::vector<Baseline> all = {Baseline::kRandom, Baseline::kBigToSmall,
                                            Baseline::kLeftToRight, Baseline::kLeftToRightTopK};
  return all;
}

Baseline parse_baseline(std::string_view name) {
  for (Baseline b : all_baselines()) {
    if (to_string(b) == name) return b;
  }
  throw UsageError("unknown baseline '" + std::string(name) +
                   "' (random, big_to_small, left_to_right, left_to_right_topk)");
}

Assignment run_baseline(Baseline b, const core::Sample& sample, std::uint64_t seed) {
  switch (b) {
    case Baseline::kRandom: return baseline_random(sample, seed);
    case Baseline::kBigToSmall: return baseline_big_to_small(sample);
    case Baseline::kLeftToRight: return baseline_left_to_right(sample, false);
    case Baseline::kLeftToRightTopK: return baseline_left_to_right(sample, true);
  }
  return {};
}

Assignment to_assignment(const core::Prediction& prediction) {
  Assignment out;
  for (const auto& lp : prediction.links) out[lp.link_id] = lp.chosen;
  return out;
}

}  // namespace cgg::bench
