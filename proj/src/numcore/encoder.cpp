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


#include "cgg/numcore/encoder.hpp"

#include <cmath>

#include "cgg/core/error.hpp"

namespace cgg::num {

namespace {

std::string pname(std::size_t layer, const char* name) {
  return "enc." + std::to_string(layer) + "." + name;
}

}  // namespace

void EncoderConfig::validate() const {
  if (d_model == 0 || n_heads == 0 || n_layers == 0 || d_ff == 0) {
    throw UsageError("encoder sizes must be positive");
  }
  if (d_model % n_heads != 0) {
    throw UsageError("d_model " + std::to_string(d_model) + " not divisible by n_heads " +
                     std::to_string(n_heads));
  }
  if (!(init_std > 0.0) || !(ln_eps > 0.0)) throw UsageError("init_std and ln_eps must be positive");
}

void add_encoder_params(ParameterStore& store, const EncoderConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  const std::size_t d = cfg.d_model, f = cfg.d_ff;
  for (std::size_t l = 0; l < cfg.n_layers; ++l) {
    // The key projection carries no bias: softmax is invariant to it.
    store.add_normal(pname(l, "wq"), {d, d}, cfg.init_std, rng);
    store.add(pname(l, "bq"), Tensor({1, d}));
    store.add_normal(pname(l, "wk"), {d, d}, cfg.init_std, rng);
    store.add_normal(pname(l, "wv"), {d, d}, cfg.init_std, rng);
    store.add(pname(l, "bv"), Tensor({1, d}));
    store.add_normal(pname(l, "wo"), {d, d}, cfg.init_std, rng);
    store.add(pname(l, "bo"), Tensor({1, d}));
    store.add(pname(l, "ln1_g"), Tensor({1, d}, 1.0));
    store.add(pname(l, "ln1_b"), Tensor({1, d}));
    store.add_normal(pname(l, "w1"), {d, f}, cfg.init_std, rng);
    store.add(pname(l, "b1"), Tensor({1, f}));
    store.add_normal(pname(l, "w2"), {f, d}, cfg.init_std, rng);
    store.add(pname(l, "b2"), Tensor({1, d}));
    store.add(pname(l, "ln2_g"), Tensor({1, d}, 1.0));
    store.add(pname(l, "ln2_b"), Tensor({1, d}));
  }
}

Var ParamBinder::operator()(std::size_t slot) {
  auto& leaf = leaves_.at(slot);
  if (!leaf) leaf = g_.param(store_[slot]);
  return *leaf;
}

Var ParamBinder::operator()(const std::string& name) { return (*this)(store_.slot_of(name)); }

Var attention_layer(ParamBinder& p, Var x, const EncoderConfig& cfg, std::size_t layer) {
  Graph& g = p.graph();
  const std::size_t dh = cfg.d_model / cfg.n_heads;
  const Var q = g.add_row(g.matmul(x, p(pname(layer, "wq"))), p(pname(layer, "bq")));
  const Var k = g.matmul(x, p(pname(layer, "wk")));
  const Var v = g.add_row(g.matmul(x, p(pname(layer, "wv"))), p(pname(layer, "bv")));
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Var> heads;
  heads.reserve(cfg.n_heads);
  for (std::size_t h = 0; h < cfg.n_heads; ++h) {
    const Var qh = g.slice_cols(q, h * dh, dh);
    const Var kh = g.slice_cols(k, h * dh, dh);
    const Var vh = g.slice_cols(v, h * dh, dh);
    const Var att = g.softmax_rows(g.scale(g.matmul_nt(qh, kh), inv_sqrt));
    heads.push_back(g.matmul(att, vh));
  }
  const Var mixed = cfg.n_heads == 1 ? heads[0] : g.concat_cols(heads);
  const Var attn_out = g.add_row(g.matmul(mixed, p(pname(layer, "wo"))), p(pname(layer, "bo")));
  const Var x1 = g.layer_norm(g.add(x, attn_out), p(pname(layer, "ln1_g")),
                              p(pname(layer, "ln1_b")), cfg.ln_eps);
  const Var hidden = g.gelu(g.add_row(g.matmul(x1, p(pname(layer, "w1"))), p(pname(layer, "b1"))));
  const Var ff = g.add_row(g.matmul(hidden, p(pname(layer, "w2"))), p(pname(layer, "b2")));
  return g.layer_norm(g.add(x1, ff), p(pname(layer, "ln2_g")), p(pname(layer, "ln2_b")), cfg.ln_eps);
}

std::vector<Var> encode(ParamBinder& p, Var x, const EncoderConfig& cfg) {
  const auto& X = p.graph().value(x);
  if (X.rows() == 0 || X.cols() != cfg.d_model) {
    throw ShapeError("encode: input " + shape_string(X.shape()) + " incompatible with d_model " +
                     std::to_string(cfg.d_model));
  }
  std::vector<Var> hidden;
  hidden.reserve(cfg.n_layers);
  Var h = x;
  for (std::size_t l = 0; l < cfg.n_layers; ++l) {
    h = attention_layer(p, h, cfg, l);
    hidden.push_back(h);
  }
  return hidden;
}

Var from_last(const std::vector<Var>& hidden, std::size_t l) {
  if (l == 0 || l > hidden.size()) {
    throw UsageError("layer " + std::to_string(l) + " from the last requested, encoder has " +
                     std::to_string(hidden.size()) + " layers");
  }
  return hidden[hidden.size() - l];
}

}  // namespace cgg::num
