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


// Post-LN transformer encoder layers on the autodiff graph.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cgg/numcore/graph.hpp"

namespace cgg::num {

struct EncoderConfig {
  std::size_t d_model = 128;
  std::size_t n_heads = 4;
  std::size_t n_layers = 4;
  std::size_t d_ff = 256;
  std::uint64_t seed = 0;
  double init_std = 0.02;
  double ln_eps = 1e-5;

  /// Throws UsageError when d_model % n_heads != 0 or any size is zero.
  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

/// Registers all encoder weights ("enc.<layer>.<name>") in `store`.
/// Weights ~ normal(0, init_std), biases zero, layer-norm gains one.
void add_encoder_params(ParameterStore& store, const EncoderConfig& cfg, std::mt19937_64& rng);

/// Maps parameter names to graph leaves, creating each leaf at most once.
class ParamBinder {
 public:
  ParamBinder(Graph& g, const ParameterStore& store)
      : g_(g), store_(store), leaves_(store.size()) {}

  Var operator()(const std::string& name);
  Var operator()(std::size_t slot);
  Graph& graph() { return g_; }
  const ParameterStore& store() const { return store_; }

 private:
  Graph& g_;
  const ParameterStore& store_;
  std::vector<std::optional<Var>> leaves_;
};

/// One layer: x1 = LN(x + MHA(x)); out = LN(x1 + FFN(x1)).
Var attention_layer(ParamBinder& p, Var x, const EncoderConfig& cfg, std::size_t layer);

/// Hidden state after every layer, first layer first. Throws ShapeError for
/// an empty sequence or a width other than d_model.
std::vector<Var> encode(ParamBinder& p, Var x, const EncoderConfig& cfg);

/// Layer counted from the last: l = 1 is the final layer.
Var from_last(const std::vector<Var>& hidden, std::size_t l);

}  // namespace cgg::num
