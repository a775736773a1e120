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


#include "cgg/grounder/model.hpp"

#include <random>

#include "cgg/core/error.hpp"
#include "cgg/geometry/box_ops.hpp"
#include "cgg/numcore/checkpoint.hpp"

namespace cgg::grounder {

using num::Shape;
using num::Tensor;
using num::Var;

GroundingModel::GroundingModel(ModelConfig config, Vocab vocab)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  config_.validate();
  if (config_.d_vis == 0) throw UsageError("model config needs d_vis > 0");
  const std::size_t d = config_.encoder.d_model;
  const double sd = config_.encoder.init_std;
  std::mt19937_64 rng(config_.seed);
  params_.add_normal("word_emb", {vocab_.size(), d}, sd, rng);
  params_.add_normal("pos_emb", {config_.max_text_len, d}, sd, rng);
  params_.add("text_ln_g", Tensor({1, d}, 1.0));
  params_.add("text_ln_b", Tensor({1, d}));
  params_.add_normal("feat_w", {config_.d_vis, d}, sd, rng);
  params_.add("feat_b", Tensor({1, d}));
  params_.add_normal("loc_w", {7, d}, sd, rng);
  params_.add("loc_b", Tensor({1, d}));
  params_.add("region_ln_g", Tensor({1, d}, 1.0));
  params_.add("region_ln_b", Tensor({1, d}));
  num::add_encoder_params(params_, config_.encoder, rng);
  params_.add_normal("cls_w1", {d, d}, sd, rng);
  params_.add_normal("cls_w2", {d, d}, sd, rng);
}

void GroundingModel::save(const std::string& path) const {
  num::save_checkpoint(path, params_);
  vocab_.save(path + ".vocab");
}

GroundingModel GroundingModel::load(const std::string& path, const ModelConfig& config) {
  GroundingModel m(config, Vocab::load(path + ".vocab"));
  num::load_checkpoint(path, m.params_);
  return m;
}

SequenceLayout layout_sample(const GroundingModel& model, const core::Sample& sample) {
  const auto& cfg = model.config();
  const NamedText named = substitute_neutral_names(sample.description, cfg.neutral_name_pool,
                                                   sample.sample_id, cfg.seed);
  SequenceLayout l;
  l.words = named.words;
  for (const auto& w : l.words) l.word_ids.push_back(model.vocab().id_of(w));
  l.link_ids = named.link_ids;
  l.link_positions = named.link_positions;
  l.n_text = l.words.size();
  l.n_persons = sample.image.persons.size();
  l.n_context = cfg.use_context_objects ? sample.image.context_objects.size() : 0;
  if (l.n_text == 0) throw DataError("sample " + sample.sample_id + ": empty description");
  if (l.n_text > cfg.max_text_len) {
    throw UsageError("sample " + sample.sample_id + ": description has " +
                     std::to_string(l.n_text) + " words, max_text_len is " +
                     std::to_string(cfg.max_text_len));
  }
  return l;
}

EncodedSample embed_sample(num::ParamBinder& p, const GroundingModel& model,
                           const core::Sample& sample) {
  const auto& cfg = model.config();
  num::Graph& g = p.graph();
  EncodedSample enc;
  enc.layout = layout_sample(model, sample);
  const auto& l = enc.layout;

  std::vector<std::size_t> positions(l.n_text);
  for (std::size_t i = 0; i < l.n_text; ++i) positions[i] = i;
  enc.text_embedding =
      g.layer_norm(g.add(g.gather_rows(p("word_emb"), l.word_ids), g.gather_rows(p("pos_emb"), positions)),
                   p("text_ln_g"), p("text_ln_b"), cfg.encoder.ln_eps);

  const std::size_t n_regions = l.n_persons + l.n_context;
  Tensor feats({n_regions, cfg.d_vis});
  Tensor locs({n_regions, 7});
  const auto& img = sample.image;
  auto fill = [&](std::size_t row, const core::BoundingBox& box, const std::vector<float>& f,
                  const std::string& what) {
    if (f.size() != cfg.d_vis) {
      throw DataError("sample " + sample.sample_id + ": " + what + " has " +
                      (f.empty() ? std::string("no feature") :
                                   "feature length " + std::to_string(f.size())) +
                      ", model expects " + std::to_string(cfg.d_vis));
    }
    for (std::size_t k = 0; k < cfg.d_vis; ++k) feats.at(row, k) = f[k];
    const auto loc = geometry::location_feature(box, img.width, img.height);
    for (std::size_t k = 0; k < 7; ++k) locs.at(row, k) = loc[k];
  };
  for (std::size_t j = 0; j < l.n_persons; ++j) {
    fill(j, img.persons[j].box, img.persons[j].feature, "person " + std::to_string(j));
  }
  for (std::size_t c = 0; c < l.n_context; ++c) {
    fill(l.n_persons + c, img.context_objects[c].box, img.context_objects[c].feature,
         "context object " + std::to_string(c));
  }
  if (n_regions > 0) {
    const Var fproj = g.add_row(g.matmul(g.constant(std::move(feats)), p("feat_w")), p("feat_b"));
    const Var lproj = g.add_row(g.matmul(g.constant(std::move(locs)), p("loc_w")), p("loc_b"));
    enc.region_embedding =
        g.layer_norm(g.add(fproj, lproj), p("region_ln_g"), p("region_ln_b"), cfg.encoder.ln_eps);
    enc.input = g.concat_rows({enc.text_embedding, enc.region_embedding});
  } else {
    enc.region_embedding = enc.text_embedding;
    enc.input = enc.text_embedding;
  }
  enc.hidden = num::encode(p, enc.input, cfg.encoder);
  return enc;
}

Var bilinear_logits(num::Graph& g, Var t, Var r, Var w1, Var w2) {
  return g.matmul_nt(g.matmul(t, w1), g.matmul(r, w2));
}

Var classification_logits(num::ParamBinder& p, const EncodedSample& enc) {
  num::Graph& g = p.graph();
  const auto& l = enc.layout;
  std::vector<std::size_t> persons(l.n_persons);
  for (std::size_t j = 0; j < l.n_persons; ++j) persons[j] = l.person_position(j);
  const Var h = enc.final_layer();
  return bilinear_logits(g, g.gather_rows(h, l.link_positions), g.gather_rows(h, persons),
                         p("cls_w1"), p("cls_w2"));
}

core::Prediction predict(const GroundingModel& model, const core::Sample& sample) {
  num::Graph g;
  num::ParamBinder p(g, model.params());
  const auto enc = embed_sample(p, model, sample);
  const auto& Q = g.value(classification_logits(p, enc));
  core::Prediction pred;
  for (std::size_t i = 0; i < enc.layout.link_ids.size(); ++i) {
    core::LinkPrediction lp;
    lp.link_id = enc.layout.link_ids[i];
    lp.scores.assign(Q.row_ptr(i), Q.row_ptr(i) + Q.cols());
    lp.chosen = core::argmax_lowest(lp.scores);
    pred.links.push_back(std::move(lp));
  }
  return pred;
}

}  // namespace cgg::grounder
