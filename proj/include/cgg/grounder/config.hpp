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


// Model and training configuration.
//
// Config files are flat "key = value" text; '#' starts a comment. Every key
// is optional and unknown keys are rejected. Keys:
//
//   d_model n_heads n_layers d_ff init_std ln_eps       encoder
//   d_vis max_text_len                                   input sizes (d_vis 0 = from data)
//   tau t1 t2 lambda contrastive_layer                   losses
//   normalized_similarity use_context_objects            true/false
//   neutral_names                                        comma-separated pool
//   seed                                                 init, names, shuffling
//   steps token_budget lr beta1 beta2 adam_eps weight_decay workers

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cgg/numcore/encoder.hpp"
#include "cgg/numcore/optimizer.hpp"

namespace cgg::grounder {

const std::vector<std::string>& default_neutral_names();

struct ModelConfig {
  num::EncoderConfig encoder;
  std::size_t d_vis = 0;
  std::size_t max_text_len = 64;
  double tau = 0.07;
  double t1 = 0.3;
  double t2 = 0.1;
  double lambda = 1.0;
  /// Counted from the last layer; 1 is the final layer.
  std::size_t contrastive_layer = 3;
  bool normalized_similarity = false;
  bool use_context_objects = true;
  std::vector<std::string> neutral_name_pool = default_neutral_names();
  std::uint64_t seed = 0;

  /// Throws UsageError naming the offending field.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct TrainSchedule {
  std::size_t steps = 4000;
  std::size_t token_budget = 4000;
  num::AdamWConfig adamw;
  int workers = 1;
  /// Linear ramp of the learning rate over the first steps.
  std::size_t warmup_steps = 0;
  /// Decays the learning rate linearly to zero at the last step.
  bool linear_decay = false;

  /// Learning rate for a 1-based step.
  double lr_at(std::size_t step) const;
  void validate() const;
  bool operator==(const TrainSchedule& o) const {
    return steps == o.steps && token_budget == o.token_budget && workers == o.workers &&
           warmup_steps == o.warmup_steps && linear_decay == o.linear_decay &&
           adamw.lr == o.adamw.lr && adamw.beta1 == o.adamw.beta1 &&
           adamw.beta2 == o.adamw.beta2 && adamw.eps == o.adamw.eps &&
           adamw.weight_decay == o.adamw.weight_decay;
  }
};

struct ExperimentConfig {
  ModelConfig model;
  TrainSchedule schedule;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws UsageError("config line N: ...") on syntax errors, unknown keys or
/// bad values.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
std::string format_config(const ExperimentConfig& cfg);

}  // namespace cgg::grounder
