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


// Classification and context contrastive losses.

#pragma once

#include <optional>
#include <vector>

#include "cgg/core/types.hpp"
#include "cgg/grounder/model.hpp"

namespace cgg::grounder {

/// Positive and negative sets for one link.
struct LinkContrast {
  int link_id = 0;
  std::size_t gt = 0;
  /// Indices into the image's context objects, with IoU(object, GT) weights.
  std::vector<std::size_t> context;
  std::vector<double> context_weights;
  /// All persons except the GT, in index order.
  std::vector<std::size_t> negatives;

  std::size_t num_positives() const { return context.size() + 1; }
};

struct ContrastiveSets {
  std::vector<LinkContrast> links;
};

/// Context object c joins C(i) when IoU(c, gt) > t1 and its IoU with every
/// other person is < t2. Links are taken in order of first appearance.
/// Throws DataError when a link has no label.
ContrastiveSets select_context_objects(const core::Sample& sample, double t1, double t2);

/// Labeled person index per link id. Throws DataError on a missing label.
std::vector<std::size_t> link_targets(const core::Sample& sample, const std::vector<int>& link_ids);

/// Mean over rows of -log softmax(Q(i,:))[targets[i]].
num::Var loss_cls(num::Graph& g, num::Var q, const std::vector<std::size_t>& targets);

/// Contrastive loss from precomputed scores (already divided by tau). Columns
/// 0..n_persons-1 are persons, the rest context objects in image order; row i
/// belongs to sets.links[i].
num::Var contrastive_from_scores(num::Graph& g, num::Var scores, const ContrastiveSets& sets,
                                 std::size_t n_persons);

/// Contrastive loss on the configured layer's link and region features.
/// Throws UsageError when tau <= 0.
num::Var loss_con(num::ParamBinder& p, const EncodedSample& enc, const ContrastiveSets& sets,
                  const ModelConfig& cfg);

struct LossParts {
  num::Var total;
  num::Var cls;
  /// Absent when lambda is 0; total is then cls itself.
  std::optional<num::Var> con;
};

/// L_cls + lambda * L_con for one sample on `p`'s graph.
LossParts loss_total(num::ParamBinder& p, const GroundingModel& model, const core::Sample& sample);

}  // namespace cgg::grounder
