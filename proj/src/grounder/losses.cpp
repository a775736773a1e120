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


#include "cgg/grounder/losses.hpp"

#include <algorithm>

#include "cgg/core/error.hpp"
#include "cgg/geometry/box_ops.hpp"

namespace cgg::grounder {

using num::Tensor;
using num::Var;

std::vector<std::size_t> link_targets(const core::Sample& sample, const std::vector<int>& link_ids) {
  std::vector<std::size_t> out;
  out.reserve(link_ids.size());
  for (int id : link_ids) {
    auto it = sample.labels.pairs.find(id);
    if (it == sample.labels.pairs.end()) {
      throw DataError("sample " + sample.sample_id + ": no label for PERSON" + std::to_string(id));
    }
    if (it->second >= sample.image.persons.size()) {
      throw DataError("sample " + sample.sample_id + ": label for PERSON" + std::to_string(id) +
                      " out of range");
    }
    out.push_back(it->second);
  }
  return out;
}

ContrastiveSets select_context_objects(const core::Sample& sample, double t1, double t2) {
  const auto& img = sample.image;
  const auto ids = sample.description.distinct_links();
  const auto gts = link_targets(sample, ids);
  ContrastiveSets sets;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    LinkContrast lc;
    lc.link_id = ids[i];
    lc.gt = gts[i];
    const auto& gt_box = img.persons[lc.gt].box;
    for (std::size_t j = 0; j < img.persons.size(); ++j) {
      if (j != lc.gt) lc.negatives.push_back(j);
    }
    for (std::size_t c = 0; c < img.context_objects.size(); ++c) {
      const auto& box = img.context_objects[c].box;
      const double with_gt = geometry::iou(box, gt_box);
      if (!(with_gt > t1)) continue;
      double worst = 0.0;
      for (std::size_t j : lc.negatives) worst = std::max(worst, geometry::iou(box, img.persons[j].box));
      if (!(worst < t2)) continue;
      lc.context.push_back(c);
      lc.context_weights.push_back(with_gt);
    }
    sets.links.push_back(std::move(lc));
  }
  return sets;
}

Var loss_cls(num::Graph& g, Var q, const std::vector<std::size_t>& targets) {
  const Tensor& qv = g.value(q);
  if (targets.size() != qv.rows()) {
    throw ShapeError("loss_cls: " + std::to_string(targets.size()) + " targets for " +
                     std::to_string(qv.rows()) + " rows");
  }
  Tensor mask(qv.shape(), 1.0);
  Tensor w(qv.shape());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= qv.cols()) throw ShapeError("loss_cls: target out of range");
    w.at(i, targets[i]) = 1.0;
  }
  return g.soft_target_xent(q, mask, w, static_cast<double>(targets.size()));
}

Var contrastive_from_scores(num::Graph& g, Var scores, const ContrastiveSets& sets,
                            std::size_t n_persons) {
  const Tensor& s = g.value(scores);
  if (s.rows() != sets.links.size()) {
    throw ShapeError("loss_con: " + std::to_string(sets.links.size()) + " links for " +
                     std::to_string(s.rows()) + " score rows");
  }
  Tensor mask(s.shape());
  Tensor w(s.shape());
  for (std::size_t i = 0; i < sets.links.size(); ++i) {
    const auto& lc = sets.links[i];
    const double inv_p = 1.0 / static_cast<double>(lc.num_positives());
    auto col = [&](std::size_t c) {
      if (c >= s.cols()) throw ShapeError("loss_con: region column out of range");
      return c;
    };
    mask.at(i, col(lc.gt)) = 1.0;
    w.at(i, lc.gt) = inv_p;
    for (std::size_t j : lc.negatives) mask.at(i, col(j)) = 1.0;
    for (std::size_t c = 0; c < lc.context.size(); ++c) {
      const std::size_t k = col(n_persons + lc.context[c]);
      mask.at(i, k) = 1.0;
      w.at(i, k) = lc.context_weights[c] * inv_p;
    }
  }
  return g.soft_target_xent(scores, mask, w, static_cast<double>(sets.links.size()));
}

Var loss_con(num::ParamBinder& p, const EncodedSample& enc, const ContrastiveSets& sets,
             const ModelConfig& cfg) {
  if (!(cfg.tau > 0.0)) throw UsageError("loss_con: tau must be > 0");
  num::Graph& g = p.graph();
  const auto& l = enc.layout;
  const Var h = num::from_last(enc.hidden, cfg.contrastive_layer);
  std::vector<std::size_t> regions(l.n_persons + l.n_context);
  for (std::size_t r = 0; r < regions.size(); ++r) regions[r] = l.n_text + r;
  Var t = g.gather_rows(h, l.link_positions);
  Var r = g.gather_rows(h, regions);
  if (cfg.normalized_similarity) {
    t = g.l2_normalize_rows(t);
    r = g.l2_normalize_rows(r);
  }
  const Var scores = g.scale(g.matmul_nt(t, r), 1.0 / cfg.tau);
  return contrastive_from_scores(g, scores, sets, l.n_persons);
}

LossParts loss_total(num::ParamBinder& p, const GroundingModel& model, const core::Sample& sample) {
  const auto& cfg = model.config();
  const EncodedSample enc = embed_sample(p, model, sample);
  num::Graph& g = p.graph();
  LossParts parts;
  parts.cls = loss_cls(g, classification_logits(p, enc), link_targets(sample, enc.layout.link_ids));
  if (cfg.lambda == 0.0) {
    parts.total = parts.cls;
    return parts;
  }
  ContrastiveSets sets = select_context_objects(sample, cfg.t1, cfg.t2);
  if (!cfg.use_context_objects) {
    for (auto& lc : sets.links) {
      lc.context.clear();
      lc.context_weights.clear();
    }
  }
  parts.con = loss_con(p, enc, sets, cfg);
  parts.total = g.add(parts.cls, g.scale(*parts.con, cfg.lambda));
  return parts;
}

}  // namespace cgg::grounder
