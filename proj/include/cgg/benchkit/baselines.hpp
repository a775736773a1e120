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


// Heuristic grounding baselines. Links are taken in order of first
// appearance; when there are more links than candidates the assignment wraps
// around the candidate order.

#pragma once

#include <cstdint>
#include <map>
#include <string_view>

#include "cgg/core/types.hpp"

namespace cgg::bench {

/// link_id -> chosen person index.
using Assignment = std::map<int, std::size_t>;

/// Each link independently uniform over the persons, seeded by (seed, sample_id).
Assignment baseline_random(const core::Sample& sample, std::uint64_t seed);
/// Persons by decreasing area, lower index first on ties.
Assignment baseline_big_to_small(const core::Sample& sample);
/// Persons by (x1, y1, index). With top_k_only, only the k largest persons
/// are candidates, k being the number of distinct links.
Assignment baseline_left_to_right(const core::Sample& sample, bool top_k_only);

enum class Baseline { kRandom, kBigToSmall, kLeftToRight, kLeftToRightTopK };

/// "random", "big_to_small", "left_to_right", "left_to_right_topk".
std::string_view to_string(Baseline b);
/// Throws UsageError on an unknown name.
Baseline parse_baseline(std::string_view name);
const std::vector<Baseline>& all_baselines();

Assignment run_baseline(Baseline b, const core::Sample& sample, std::uint64_t seed = 0);

Assignment to_assignment(const core::Prediction& prediction);

}  // namespace cgg::bench
