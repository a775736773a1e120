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


// Seeded toy configurations and samples for gradient checks.

#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cgg/core/types.hpp"
#include "cgg/grounder/config.hpp"
#include "cgg/grounder/losses.hpp"
#include "cgg/grounder/model.hpp"
#include "cgg/grounder/vocab.hpp"
#include "cgg/numcore/grad_check.hpp"

namespace cgg::testing {

struct GradCase {
  grounder::ModelConfig config;
  core::Sample sample;
};

inline const std::vector<std::string>& grad_words() {
  static const std::vector<std::string> w = {"will", "leave", "the", "cup", "because", "is",
                                             "upset", "near", "and", "wants", "to", "go"};
  return w;
}

/// Case `i` of the gradient suite: 1 or 2 layers, 1 to 4 heads, up to 5
/// persons and 7 context objects, up to 10 words.
inline GradCase grad_case(int i, std::size_t d_model = 8) {
  std::mt19937_64 rng(0x6772616400ULL + static_cast<std::uint64_t>(i));
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  GradCase c;
  auto& cfg = c.config;
  const std::size_t heads[] = {1, 2, 4};
  cfg.encoder.d_model = d_model;
  cfg.encoder.n_heads = heads[pick(3)];
  while (d_model % cfg.encoder.n_heads != 0) cfg.encoder.n_heads /= 2;
  cfg.encoder.n_layers = 1 + pick(2);
  cfg.encoder.d_ff = 2 * cfg.encoder.d_model;
  cfg.encoder.init_std = 0.7 / std::sqrt(static_cast<double>(cfg.encoder.d_model));
  cfg.contrastive_layer = 1 + pick(cfg.encoder.n_layers);
  cfg.d_vis = 6;
  cfg.max_text_len = 12;
  cfg.tau = uniform(0.5, 2.0);
  cfg.lambda = uniform(0.5, 1.5);
  cfg.normalized_similarity = (i % 4 == 3);
  if (cfg.normalized_similarity) cfg.tau = 0.2;
  cfg.seed = 100 + static_cast<std::uint64_t>(i);
  cfg.encoder.seed = cfg.seed;

  auto& s = c.sample;
  s.sample_id = "g" + std::to_string(i);
  auto& img = s.image;
  img.image_id = "img_g" + std::to_string(i);
  const std::size_t n = 2 + pick(4);
  img.width = static_cast<int>(100 * n);
  img.height = 240;
  auto feature = [&] {
    std::vector<float> f(cfg.d_vis);
    for (auto& v : f) v = static_cast<float>(uniform(-1.0, 1.0));
    return f;
  };
  for (std::size_t j = 0; j < n; ++j) {
    core::PersonBox p;
    p.index = j;
    const double x = 100.0 * j + uniform(0, 10);
    p.box = {x, uniform(0, 30), x + uniform(60, 85), uniform(150, 235)};
    p.feature = feature();
    img.persons.push_back(std::move(p));
  }
  const std::size_t n_ctx = std::min<std::size_t>(pick(8), 12 - n);
  for (std::size_t k = 0; k < n_ctx; ++k) {
    const auto& host = img.persons[pick(n)].box;
    core::ContextObject o;
    const double w = host.width() * uniform(0.4, 0.9);
    const double h = host.height() * uniform(0.4, 0.9);
    const double x = host.x1 + uniform(0, host.width() - w) + (k % 3 == 0 ? 40.0 : 0.0);
    const double y = host.y1 + uniform(0, host.height() - h);
    o.box = {x, y, std::min(x + w, static_cast<double>(img.width)), y + h};
    o.feature = feature();
    o.objectness = uniform(0.3, 1.0);
    o.class_name = "cup";
    img.context_objects.push_back(std::move(o));
  }

  const std::size_t n_links = 1 + pick(2);
  const std::size_t n_words = 3 + pick(6);
  std::vector<std::size_t> link_at = {0};
  if (n_links == 2) link_at.push_back(1 + pick(n_words));
  std::size_t next_link = 0;
  for (std::size_t t = 0; t <= n_words; ++t) {
    if (next_link < link_at.size() && link_at[next_link] == t) {
      s.description.tokens.emplace_back(core::PersonLink{static_cast<int>(next_link)});
      s.labels.pairs[static_cast<int>(next_link)] = pick(n);
      ++next_link;
    }
    if (t < n_words) s.description.tokens.emplace_back(core::Word{grad_words()[pick(grad_words().size())]});
  }
  return c;
}

inline grounder::GroundingModel grad_model(const GradCase& c) {
  return grounder::GroundingModel(c.config, grounder::Vocab::build({c.sample}, c.config.neutral_name_pool));
}

/// {L_cls, L_con, L_total} from one loss_total graph; lambda must be > 0.
inline num::MultiLossBuilder grad_losses(const grounder::GroundingModel& model,
                                         const core::Sample& sample) {
  return [&model, &sample](num::ParamBinder& p) {
    const auto parts = grounder::loss_total(p, model, sample);
    return std::vector<num::Var>{parts.cls, *parts.con, parts.total};
  };
}

inline num::LossBuilder grad_loss_total(const grounder::GroundingModel& model,
                                        const core::Sample& sample) {
  return [&model, &sample](num::ParamBinder& p) { return grounder::loss_total(p, model, sample).total; };
}

}  // namespace cgg::testing
