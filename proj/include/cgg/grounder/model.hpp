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


// The grounding model: input embedding, encoder, bilinear person classifier.
//
// Sequence layout: [text words] ++ [person regions] ++ [context regions].
// Words get learned embeddings plus learned absolute positions; regions get
// LN(feature projection + location projection) with one projection pair for
// persons and context objects alike.

#pragma once

#include <string>
#include <vector>

#include "cgg/core/types.hpp"
#include "cgg/grounder/config.hpp"
#include "cgg/grounder/vocab.hpp"
#include "cgg/numcore/encoder.hpp"
#include "cgg/numcore/graph.hpp"

namespace cgg::grounder {

class GroundingModel {
 public:
  /// Registers all parameters, initialized from config.seed. Requires
  /// config.d_vis > 0.
  GroundingModel(ModelConfig config, Vocab vocab);

  const ModelConfig& config() const { return config_; }
  ModelConfig& mutable_config() { return config_; }
  const Vocab& vocab() const { return vocab_; }
  num::ParameterStore& params() { return params_; }
  const num::ParameterStore& params() const { return params_; }

  /// Writes the parameters to `path` and the vocabulary to `path`.vocab.
  void save(const std::string& path) const;
  /// Rebuilds the model for `config` from a checkpoint written by save().
  static GroundingModel load(const std::string& path, const ModelConfig& config);

 private:
  ModelConfig config_;
  Vocab vocab_;
  num::ParameterStore params_;
};

struct SequenceLayout {
  std::vector<std::string> words;
  std::vector<std::size_t> word_ids;
  /// Distinct link ids in order of first appearance, with their positions.
  std::vector<int> link_ids;
  std::vector<std::size_t> link_positions;
  std::size_t n_text = 0;
  std::size_t n_persons = 0;
  std::size_t n_context = 0;

  std::size_t length() const { return n_text + n_persons + n_context; }
  std::size_t person_position(std::size_t j) const { return n_text + j; }
  std::size_t context_position(std::size_t c) const { return n_text + n_persons + c; }
};

struct EncodedSample {
  SequenceLayout layout;
  num::Var text_embedding;
  num::Var region_embedding;
  num::Var input;
  /// Hidden state after each encoder layer, first layer first.
  std::vector<num::Var> hidden;

  num::Var final_layer() const { return hidden.back(); }
};

/// Word ids and link positions for a sample; context objects are left out
/// when the model config disables them.
SequenceLayout layout_sample(const GroundingModel& model, const core::Sample& sample);

/// Builds the embeddings and runs the encoder on `p`'s graph. Throws
/// DataError naming the region for a missing or mis-sized feature, and
/// UsageError when the text exceeds max_text_len.
EncodedSample embed_sample(num::ParamBinder& p, const GroundingModel& model,
                           const core::Sample& sample);

/// Q = (T W1)(R W2)^T for link features T [k,d] and person features R [N,d].
num::Var bilinear_logits(num::Graph& g, num::Var t, num::Var r, num::Var w1, num::Var w2);

/// Q over final-layer link-token and person-region features, shape k x N.
num::Var classification_logits(num::ParamBinder& p, const EncodedSample& enc);

/// Argmax per link with lowest-index ties, scores = rows of Q.
core::Prediction predict(const GroundingModel& model, const core::Sample& sample);

}  // namespace cgg::grounder
