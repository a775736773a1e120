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


#include "cgg/benchkit/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>

#include "cgg/core/error.hpp"

namespace cgg::bench {

namespace {

constexpr std::size_t kAttrs = 10;
constexpr std::size_t kClasses = 6;
constexpr int kPlacementTries = 500;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

std::string padded(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%06zu", prefix, i);
  return buf;
}

bool disjoint(const core::BoundingBox& a, const core::BoundingBox& b) {
  return a.x2 <= b.x1 || b.x2 <= a.x1 || a.y2 <= b.y1 || b.y2 <= a.y1;
}

std::vector<float> feature(Rng& rng, std::size_t d_vis, std::size_t hot, double noise) {
  std::vector<float> f(d_vis);
  for (std::size_t k = 0; k < d_vis; ++k) {
    f[k] = static_cast<float>((k == hot ? 1.0 : 0.0) + uniform(rng, -noise, noise));
  }
  return f;
}

std::vector<core::BoundingBox> place_persons(Rng& rng, std::size_t n) {
  for (int attempt = 0; attempt < kPlacementTries; ++attempt) {
    std::vector<core::BoundingBox> boxes;
    for (int tries = 0; boxes.size() < n && tries < kPlacementTries; ++tries) {
      const double w = uniform(rng, 40, 110);
      const double h = uniform(rng, 120, 320);
      const double x = uniform(rng, 0, kCanvasWidth - w);
      const double y = uniform(rng, 0, kCanvasHeight - h);
      const core::BoundingBox b{x, y, x + w, y + h};
      if (std::all_of(boxes.begin(), boxes.end(), [&](const auto& o) { return disjoint(b, o); })) {
        boxes.push_back(b);
      }
    }
    if (boxes.size() == n) return boxes;
  }
  throw DataError("synth: could not place " + std::to_string(n) + " persons without overlap");
}

core::ContextObject object_in(Rng& rng, const core::PersonBox& host_person, std::size_t owner_attr,
                              std::size_t cls, const SynthConfig& cfg) {
  const auto& host = host_person.box;
  core::ContextObject o;
  const double w = host.width() * uniform(rng, 0.6, 0.9);
  const double h = host.height() * uniform(rng, 0.6, 0.9);
  const double x = host.x1 + uniform(rng, 0, host.width() - w);
  const double y = host.y1 + uniform(rng, 0, host.height() - h);
  o.box = {x, y, x + w, y + h};
  o.feature = feature(rng, cfg.d_vis, kAttrs + cls, cfg.feature_noise);
  o.feature[owner_attr] += static_cast<float>(cfg.owner_appearance);
  o.objectness = uniform(rng, 0.5, 1.0);
  o.class_name = synth_object_classes()[cls];
  return o;
}

core::TokenList words(core::TokenList tokens, std::initializer_list<std::string> rest) {
  for (const auto& w : rest) tokens.emplace_back(core::Word{w});
  return tokens;
}

}  // namespace

void SynthConfig::validate() const {
  if (max_persons < core::kMinPersons || max_persons > core::kMaxPersons) {
    throw UsageError("synth: max_persons must be in [2, 10]");
  }
  if (d_vis < kAttrs + kClasses) throw UsageError("synth: d_vis must be at least 16");
  if (!(context_rate >= 0.0 && context_rate <= 1.0)) throw UsageError("synth: context_rate must be in [0, 1]");
  if (!(owner_appearance >= 0.0 && owner_appearance <= 1.0)) {
    throw UsageError("synth: owner_appearance must be in [0, 1]");
  }
  if (!(distractor_rate >= 0.0 && distractor_rate <= 1.0)) {
    throw UsageError("synth: distractor_rate must be in [0, 1]");
  }
  if (!(feature_noise >= 0.0 && feature_noise <= 0.25)) {
    throw UsageError("synth: feature_noise must be in [0, 0.25]");
  }
}

const std::vector<std::string>& synth_attributes() {
  static const std::vector<std::string> a = {"red",   "green",  "blue", "yellow", "black",
                                             "white", "orange", "gray", "purple", "brown"};
  return a;
}

const std::vector<std::string>& synth_object_classes() {
  static const std::vector<std::string> c = {"cup", "dog", "bag", "umbrella", "bicycle", "phone"};
  return c;
}

core::Dataset synth_generate(const SynthConfig& config) {
  config.validate();
  core::Dataset ds;
  ds.header.d_vis = config.d_vis;
  Rng rng(config.seed);
  for (std::size_t i = 0; i < config.n_samples; ++i) {
    core::Sample s;
    s.sample_id = padded("s", i);
    auto& img = s.image;
    img.image_id = padded("img", i);
    img.width = kCanvasWidth;
    img.height = kCanvasHeight;
    const std::size_t n = core::kMinPersons + below(rng, config.max_persons - core::kMinPersons + 1);
    const auto boxes = place_persons(rng, n);
    const std::size_t gt = below(rng, n);
    const bool context = uniform(rng, 0.0, 1.0) < config.context_rate;

    std::vector<std::size_t> attrs(kAttrs);
    std::iota(attrs.begin(), attrs.end(), 0);
    std::shuffle(attrs.begin(), attrs.end(), rng);
    for (std::size_t j = 0; j < n; ++j) {
      core::PersonBox p;
      p.index = j;
      p.box = boxes[j];
      p.feature = feature(rng, config.d_vis, attrs[j], config.feature_noise);
      img.persons.push_back(std::move(p));
    }

    const core::TokenList link = {core::PersonLink{0}};
    if (context) {
      std::vector<std::size_t> classes(kClasses);
      std::iota(classes.begin(), classes.end(), 0);
      std::shuffle(classes.begin(), classes.end(), rng);
      const std::size_t target = classes[0];
      std::size_t distractors = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == gt) {
          img.context_objects.push_back(object_in(rng, img.persons[j], attrs[j], target, config));
        } else if (uniform(rng, 0.0, 1.0) < config.distractor_rate) {
          const std::size_t cls = classes[1 + distractors++ % (kClasses - 1)];
          img.context_objects.push_back(object_in(rng, img.persons[j], attrs[j], cls, config));
        }
      }
      s.description.tokens = words(link, {"next", "to", "the", synth_object_classes()[target], "feels", "upset"});
      s.commonsense_type = core::CommonsenseType::kSpatial;
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        if (uniform(rng, 0.0, 1.0) < 0.5) {
          img.context_objects.push_back(object_in(rng, img.persons[j], attrs[j], below(rng, kClasses), config));
        }
      }
      s.description.tokens = words(link, {"who", "is", synth_attributes()[attrs[gt]], "will", "leave"});
      s.commonsense_type = core::CommonsenseType::kAttribute;
    }
    s.labels.pairs[0] = gt;
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace cgg::bench
