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


// Synthetic grounding scenes.
//
// Each scene has N non-overlapping persons. A person feature is
//   [attribute one-hot (10)] [object-class block (6), zero] [noise dims]
// and a context object feature is
//   [zero (10)] [class one-hot (6)] [noise dims],
// with every entry perturbed by uniform noise in [-0.2, 0.2]. Descriptions
// have one link and follow one of two templates:
//   attribute: "PERSON0 who is <color> will leave"       (only the GT has it)
//   context:   "PERSON0 next to the <class> feels upset" (only the GT's own
//              object has that class)
// Context objects sit inside their person's box, so they overlap it with
// IoU in [0.36, 0.81] and touch no other person. Ground truth is drawn
// uniformly, independent of box size and position.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cgg/core/types.hpp"

namespace cgg::bench {

struct SynthConfig {
  std::size_t n_samples = 2000;
  std::size_t max_persons = 5;
  /// At least 16; dims past the two one-hot blocks are pure noise.
  std::size_t d_vis = 20;
  /// Probability that a scene uses the context template.
  double context_rate = 0.5;
  std::uint64_t seed = 7;
  /// Added to the owner's attribute slot in an object's feature, as a crop
  /// overlapping a person picks up some of its appearance. This is the only
  /// signal tying an object to its holder; weaker values make context scenes
  /// much harder for the toy model.
  double owner_appearance = 1.0;
  /// Probability that a non-target person in a context scene holds an
  /// object of another class.
  double distractor_rate = 0.7;
  /// Half-width of the uniform noise added to every feature entry.
  double feature_noise = 0.05;

  /// Throws UsageError.
  void validate() const;
};

inline constexpr int kCanvasWidth = 640;
inline constexpr int kCanvasHeight = 480;

const std::vector<std::string>& synth_attributes();
const std::vector<std::string>& synth_object_classes();

/// Deterministic per config. Throws DataError when a scene cannot be placed
/// within the retry budget.
core::Dataset synth_generate(const SynthConfig& config);

}  // namespace cgg::bench
