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


#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "cgg/core/error.hpp"
#include "cgg/numcore/checkpoint.hpp"
#include "cgg/numcore/encoder.hpp"
#include "cgg/numcore/grad_check.hpp"
#include "cgg/numcore/graph.hpp"
#include "cgg/numcore/optimizer.hpp"

namespace fs = std::filesystem;
using namespace cgg::num;

namespace {

Tensor rand_tensor(Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> n(0.0, scale);
  for (auto& v : t.values()) v = n(rng);
  return t;
}

EncoderConfig small_encoder(std::size_t d, std::size_t layers, std::uint64_t seed) {
  EncoderConfig c;
  c.d_model = d;
  c.n_heads = 2;
  c.n_layers = layers;
  c.d_ff = 2 * d;
  c.seed = seed;
  c.init_std = 0.3;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Tensor, ShapeChecks) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), cgg::ShapeError);
  Tensor t({2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_EQ(Tensor::row({1, 2}).shape(), (Shape{1, 2}));
}

TEST(Ops, SoftmaxSymmetric) {
  Graph g;
  const Var y = g.softmax_rows(g.constant(Tensor::row({0.0, 0.0})));
  EXPECT_EQ(g.value(y)[0], 0.5);
  EXPECT_EQ(g.value(y)[1], 0.5);
}

TEST(Ops, SoftmaxRowsSumToOne) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    Graph g;
    const Var y = g.softmax_rows(g.constant(rand_tensor({4, static_cast<std::size_t>(1 + trial % 9)}, rng, 10.0)));
    const auto& Y = g.value(y);
    for (std::size_t i = 0; i < Y.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < Y.cols(); ++j) {
        EXPECT_GT(Y.at(i, j), 0.0);
        EXPECT_LE(Y.at(i, j), 1.0);
        s += Y.at(i, j);
      }
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(Ops, LayerNormConstantRowIsZero) {
  Graph g;
  const Var y = g.layer_norm(g.constant(Tensor::row({3.0, 3.0, 3.0, 3.0})),
                             g.constant(Tensor({1, 4}, 1.0)), g.constant(Tensor({1, 4})));
  for (double v : g.value(y).values()) EXPECT_NEAR(v, 0.0, 1e-6);
}

TEST(Ops, ShapeMismatchListsBothShapes) {
  Graph g;
  try {
    g.matmul(g.constant(Tensor({2, 3})), g.constant(Tensor({4, 5})));
    FAIL();
  } catch (const cgg::ShapeError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("[2, 3]"), std::string::npos);
    EXPECT_NE(m.find("[4, 5]"), std::string::npos);
  }
  EXPECT_THROW(g.add(g.constant(Tensor({2, 3})), g.constant(Tensor({3, 2}))), cgg::ShapeError);
}

TEST(Ops, NonFiniteIsAnError) {
  Graph g;
  EXPECT_THROW(g.constant(Tensor::row({std::nan("")})), cgg::NumericError);
  const Var big = g.constant(Tensor::row({1e308}));
  EXPECT_THROW(g.scale(big, 10.0), cgg::NumericError);
}

TEST(Graph, FanOutAccumulates) {
  ParameterStore ps;
  ps.add("x", Tensor::row({1.0, -2.0, 3.0}));
  Graph g;
  const Var x = g.param(ps[0]);
  const Var loss = g.add(g.matmul_nt(x, x), g.matmul_nt(x, g.scale(x, 2.0)));
  g.backward(loss);
  // d/dx (3 x.x) = 6x
  EXPECT_EQ(g.grad(x), Tensor::row({6.0, -12.0, 18.0}));
  auto grads = ps.zero_grads();
  g.accumulate_param_grads(grads);
  EXPECT_EQ(grads[0], Tensor::row({6.0, -12.0, 18.0}));
  EXPECT_THROW(g.backward(loss), cgg::UsageError);
}

TEST(Graph, ParameterStore) {
  ParameterStore ps;
  EXPECT_EQ(ps.add("a", Tensor({2, 2})), 0u);
  EXPECT_THROW(ps.add("a", Tensor({1, 1})), cgg::UsageError);
  EXPECT_EQ(ps.slot_of("a"), 0u);
  EXPECT_THROW(ps.slot_of("b"), cgg::UsageError);
  EXPECT_EQ(ps.num_values(), 4u);
}

TEST(Encoder, ConfigValidation) {
  EncoderConfig c = small_encoder(16, 2, 0);
  c.n_heads = 3;
  EXPECT_THROW(c.validate(), cgg::UsageError);
  c = small_encoder(16, 0, 0);
  EXPECT_THROW(c.validate(), cgg::UsageError);
}

TEST(Encoder, ZeroedBranchesHandTrace) {
  EncoderConfig cfg;
  cfg.d_model = 4;
  cfg.n_heads = 2;
  cfg.n_layers = 1;
  cfg.d_ff = 8;
  ParameterStore ps;
  std::mt19937_64 rng(3);
  add_encoder_params(ps, cfg, rng);
  for (const char* name : {"wv", "bv", "wo", "bo", "w1", "b1", "w2", "b2"}) {
    ps[ps.slot_of(std::string("enc.0.") + name)].value.fill(0.0);
  }
  const Tensor x({2, 4}, {1, 2, 3, 4, 0, -1, 0, 1});
  Graph g;
  ParamBinder p(g, ps);
  const auto& Y = g.value(attention_layer(p, g.constant(x), cfg, 0));
  auto ln = [](std::vector<double> r) {
    double mean = 0.0, var = 0.0;
    for (double v : r) mean += v / 4.0;
    for (double v : r) var += (v - mean) * (v - mean) / 4.0;
    for (double& v : r) v = (v - mean) / std::sqrt(var + 1e-5);
    return r;
  };
  for (std::size_t i = 0; i < 2; ++i) {
    const auto want = ln(ln({x.at(i, 0), x.at(i, 1), x.at(i, 2), x.at(i, 3)}));
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(Y.at(i, j), want[j], 1e-12);
  }
}

TEST(Encoder, SingleLayerFinalEqualsOnly) {
  const auto cfg = small_encoder(8, 1, 1);
  ParameterStore ps;
  std::mt19937_64 rng(cfg.seed);
  add_encoder_params(ps, cfg, rng);
  Graph g;
  ParamBinder p(g, ps);
  std::mt19937_64 r2(2);
  const auto hidden = encode(p, g.constant(rand_tensor({3, 8}, r2)), cfg);
  ASSERT_EQ(hidden.size(), 1u);
  EXPECT_EQ(from_last(hidden, 1).id, hidden[0].id);
  EXPECT_THROW(from_last(hidden, 2), cgg::UsageError);
  EXPECT_THROW(from_last(hidden, 0), cgg::UsageError);
}

TEST(Encoder, PermutationEquivariant) {
  const auto cfg = small_encoder(8, 2, 4);
  ParameterStore ps;
  std::mt19937_64 rng(cfg.seed);
  add_encoder_params(ps, cfg, rng);
  std::mt19937_64 r2(5);
  const Tensor x = rand_tensor({5, 8}, r2);
  Tensor xp = x;
  for (std::size_t j = 0; j < 8; ++j) std::swap(xp.at(1, j), xp.at(3, j));
  Graph g1, g2;
  ParamBinder p1(g1, ps), p2(g2, ps);
  const auto& y = g1.value(encode(p1, g1.constant(x), cfg).back());
  const auto& yp = g2.value(encode(p2, g2.constant(xp), cfg).back());
  for (std::size_t i = 0; i < 5; ++i) {
    const std::size_t src = i == 1 ? 3 : i == 3 ? 1 : i;
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(yp.at(i, j), y.at(src, j), 1e-12);
  }
}

TEST(Encoder, DeterministicInitAndForward) {
  const auto cfg = small_encoder(16, 2, 99);
  ParameterStore a, b;
  std::mt19937_64 ra(cfg.seed), rb(cfg.seed);
  add_encoder_params(a, cfg, ra);
  add_encoder_params(b, cfg, rb);
  EXPECT_EQ(a, b);
  std::mt19937_64 r2(6);
  const Tensor x = rand_tensor({4, 16}, r2);
  Graph g1, g2;
  ParamBinder p1(g1, a), p2(g2, b);
  EXPECT_EQ(g1.value(encode(p1, g1.constant(x), cfg).back()),
            g2.value(encode(p2, g2.constant(x), cfg).back()));
}

TEST(Encoder, RejectsBadInput) {
  const auto cfg = small_encoder(8, 1, 0);
  ParameterStore ps;
  std::mt19937_64 rng(0);
  add_encoder_params(ps, cfg, rng);
  Graph g;
  ParamBinder p(g, ps);
  EXPECT_THROW(encode(p, g.constant(Tensor({3, 7})), cfg), cgg::ShapeError);
}

TEST(GradCheck, QuadraticIsExact) {
  ParameterStore ps;
  std::mt19937_64 rng(10);
  ps.add("W", rand_tensor({5, 3}, rng));
  const Tensor x = rand_tensor({1, 5}, rng);
  const auto rep = grad_check(
      [&](ParamBinder& p) {
        Graph& g = p.graph();
        const Var y = g.matmul(g.constant(x), p("W"));
        return g.scale(g.matmul_nt(y, y), 0.5);
      },
      ps);
  EXPECT_LT(rep.max_rel_error, 1e-8);
  EXPECT_EQ(rep.entries_checked, 15u);
}

namespace {

LossBuilder encoder_xent(const EncoderConfig& cfg, const Tensor& x, std::size_t classes,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tensor mask({x.rows(), classes}, 1.0);
  Tensor w({x.rows(), classes});
  for (std::size_t i = 0; i < x.rows(); ++i) w.at(i, rng() % classes) = 1.0;
  return [=](ParamBinder& p) {
    Graph& g = p.graph();
    const Var h = encode(p, g.constant(x), cfg).back();
    const Var logits = g.matmul(h, p("head"));
    return g.soft_target_xent(logits, mask, w, static_cast<double>(x.rows()));
  };
}

}  // namespace

TEST(GradCheck, TwoLayerEncoderCrossEntropy) {
  const auto cfg = small_encoder(16, 2, 21);
  ParameterStore ps;
  std::mt19937_64 rng(cfg.seed);
  add_encoder_params(ps, cfg, rng);
  ps.add_normal("head", {16, 3}, 0.5, rng);
  const Tensor x = rand_tensor({4, 16}, rng);
  const auto rep = grad_check(encoder_xent(cfg, x, 3, 5), ps);
  EXPECT_LT(rep.max_rel_error, 1e-4) << rep.worst_param << "[" << rep.worst_index << "]";
}

TEST(GradCheck, CorruptedGradientDetected) {
  const auto cfg = small_encoder(8, 1, 22);
  ParameterStore ps;
  std::mt19937_64 rng(cfg.seed);
  add_encoder_params(ps, cfg, rng);
  ps.add_normal("head", {8, 3}, 0.5, rng);
  const Tensor x = rand_tensor({3, 8}, rng);
  GradCheckOptions opts;
  opts.corrupt = [](Gradients& g) {
    std::size_t bs = 0, bi = 0;
    double best = -1.0;
    for (std::size_t s = 0; s < g.size(); ++s) {
      for (std::size_t i = 0; i < g[s].size(); ++i) {
        if (std::abs(g[s][i]) > best) best = std::abs(g[s][i]), bs = s, bi = i;
      }
    }
    g[bs][bi] *= 2.0;
  };
  const auto rep = grad_check(encoder_xent(cfg, x, 3, 6), ps, opts);
  EXPECT_GT(rep.max_rel_error, 0.3);
}

TEST(GradCheck, EachOpSeparately) {
  std::mt19937_64 rng(30);
  ParameterStore ps;
  ps.add("a", rand_tensor({3, 4}, rng));
  ps.add("b", rand_tensor({4, 5}, rng));
  ps.add("c", rand_tensor({2, 4}, rng));
  ps.add("g", rand_tensor({1, 4}, rng));
  ps.add("r", rand_tensor({1, 4}, rng));
  Tensor mask({5, 4}, 1.0);
  mask.at(0, 1) = 0.0;
  mask.at(4, 0) = mask.at(4, 1) = mask.at(4, 2) = mask.at(4, 3) = 0.0;
  Tensor w({5, 4});
  w.at(0, 0) = 0.7;
  w.at(0, 2) = 0.3;
  w.at(1, 3) = 1.0;
  w.at(2, 1) = 0.25;
  w.at(3, 0) = 1.0;
  w.at(3, 3) = 0.5;
  const std::vector<std::function<Var(ParamBinder&)>> cases = {
      [&](ParamBinder& p) {
        Graph& g = p.graph();
        const Var ab = g.matmul(p("a"), p("b"));
        return g.matmul_nt(g.slice_cols(g.gelu(ab), 1, 3), g.slice_cols(ab, 0, 3));
      },
      [&](ParamBinder& p) {
        Graph& g = p.graph();
        const Var y = g.layer_norm(g.concat_rows({p("a"), p("c")}), p("g"), p("r"));
        return g.softmax_rows(g.matmul_nt(y, g.gather_rows(y, {4, 0, 0})));
      },
      [&](ParamBinder& p) {
        Graph& g = p.graph();
        const Var n = g.l2_normalize_rows(g.add_row(p("a"), p("r")));
        return g.matmul_nt(g.concat_cols({n, p("a")}), g.concat_cols({p("c"), g.gather_rows(n, {2, 0})}));
      },
      [&](ParamBinder& p) {
        Graph& g = p.graph();
        const Var s = g.matmul(g.concat_rows({p("a"), p("c")}), g.slice_cols(p("b"), 0, 4));
        return g.soft_target_xent(s, mask, w, 3.0);
      },
  };
  for (std::size_t c = 0; c < cases.size(); ++c) {
    // Reduce matrix outputs to a scalar through a fixed random projection.
    const auto loss = [&, c](ParamBinder& p) {
      Graph& g = p.graph();
      const Var out = cases[c](p);
      const auto& v = g.value(out);
      if (v.size() == 1) return out;
      std::mt19937_64 r(77);
      Tensor proj({1, v.cols()});
      for (auto& x : proj.values()) x = std::normal_distribution<double>()(r);
      Tensor proj2({1, v.rows()});
      for (auto& x : proj2.values()) x = std::normal_distribution<double>()(r);
      const Var col = g.matmul_nt(out, g.constant(proj));
      return g.matmul(g.constant(proj2), col);
    };
    const auto rep = grad_check(loss, ps);
    EXPECT_LT(rep.max_rel_error, 1e-6) << "case " << c << " " << rep.worst_param;
  }
}

TEST(GradCheck, EpsilonRangeAndNonFiniteLoss) {
  ParameterStore ps;
  ps.add("x", Tensor::row({1.0}));
  auto loss = [](ParamBinder& p) { return p.graph().matmul_nt(p("x"), p("x")); };
  GradCheckOptions o;
  o.epsilon = 1e-3;
  EXPECT_THROW(grad_check(loss, ps, o), cgg::UsageError);
  o.epsilon = 1e-8;
  EXPECT_THROW(grad_check(loss, ps, o), cgg::UsageError);
  ps[0].value[0] = 1e200;
  EXPECT_THROW(grad_check(loss, ps), cgg::NumericError);
}

TEST(Optimizer, ZeroGradientFixedPoint) {
  ParameterStore ps;
  ps.add("w", Tensor::row({1.0, -2.0}));
  auto st = AdamWState::zeros_like(ps);
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  adamw_step(ps, ps.zero_grads(), st, cfg);
  EXPECT_EQ(ps[0].value, Tensor::row({1.0, -2.0}));
}

TEST(Optimizer, DescentOnQuadratic) {
  ParameterStore ps;
  ps.add("t", Tensor::scalar(1.0));
  auto st = AdamWState::zeros_like(ps);
  AdamWConfig cfg;
  cfg.lr = 0.1;
  Gradients g = {Tensor::scalar(1.0)};  // d/dθ θ²/2 at θ=1
  adamw_step(ps, g, st, cfg);
  EXPECT_LT(ps[0].value[0], 1.0);
}

TEST(Optimizer, DecoupledDecayHandValue) {
  ParameterStore ps;
  ps.add("t", Tensor::scalar(2.0));
  auto st = AdamWState::zeros_like(ps);
  AdamWConfig cfg;
  cfg.lr = 0.1;
  cfg.weight_decay = 0.5;
  adamw_step(ps, {Tensor::scalar(3.0)}, st, cfg);
  // decay: 2 - 0.1*0.5*2 = 1.9; first Adam step moves by lr * g/|g| = 0.1.
  EXPECT_NEAR(ps[0].value[0], 1.8, 1e-7);
}

TEST(Optimizer, DeterministicAndValidated) {
  std::mt19937_64 rng(4);
  ParameterStore a;
  a.add("w", rand_tensor({3, 3}, rng));
  ParameterStore b = a;
  auto sa = AdamWState::zeros_like(a), sb = AdamWState::zeros_like(b);
  for (int i = 0; i < 5; ++i) {
    Gradients g = {rand_tensor({3, 3}, rng)};
    adamw_step(a, g, sa, {});
    adamw_step(b, g, sb, {});
  }
  EXPECT_EQ(a, b);
  EXPECT_EQ(sa, sb);
  Gradients bad = {Tensor({3, 3}, std::nan(""))};
  const ParameterStore before = a;
  EXPECT_THROW(adamw_step(a, bad, sa, {}), cgg::NumericError);
  EXPECT_EQ(a, before);
  EXPECT_THROW(adamw_step(a, {Tensor({2, 2})}, sa, {}), cgg::ShapeError);
}

TEST(Checkpoint, RoundTripBitwise) {
  const auto dir = fs::temp_directory_path() / ("cgg_ckpt_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  const auto cfg = small_encoder(8, 2, 1);
  ParameterStore ps;
  std::mt19937_64 rng(cfg.seed);
  add_encoder_params(ps, cfg, rng);
  save_checkpoint((dir / "a.cgw").string(), ps);
  ParameterStore other;
  std::mt19937_64 rng2(12345);
  add_encoder_params(other, cfg, rng2);
  load_checkpoint((dir / "a.cgw").string(), other);
  save_checkpoint((dir / "b.cgw").string(), other);
  EXPECT_EQ(slurp(dir / "a.cgw"), slurp(dir / "b.cgw"));
  for (std::size_t s = 0; s < ps.size(); ++s) {
    for (std::size_t i = 0; i < ps[s].value.size(); ++i) {
      EXPECT_EQ(other[s].value[i], static_cast<double>(static_cast<float>(ps[s].value[i])));
    }
  }
  fs::remove_all(dir);
}

TEST(Checkpoint, RejectsMismatches) {
  const auto dir = fs::temp_directory_path() / ("cgg_ckpt_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  const auto path = (dir / "c.cgw").string();
  ParameterStore ps;
  ps.add("a", Tensor({2, 3}, 1.5));
  ps.add("b", Tensor({1, 4}, -1.0));
  save_checkpoint(path, ps);

  ParameterStore renamed;
  renamed.add("a", Tensor({2, 3}));
  renamed.add("x", Tensor({1, 4}));
  EXPECT_THROW(load_checkpoint(path, renamed), cgg::DataError);
  EXPECT_EQ(renamed[0].value, Tensor({2, 3}));

  ParameterStore reshaped;
  reshaped.add("a", Tensor({3, 2}));
  reshaped.add("b", Tensor({1, 4}));
  EXPECT_THROW(load_checkpoint(path, reshaped), cgg::DataError);

  std::string bytes = slurp(path);
  bytes[0] = 'X';
  std::ofstream(dir / "bad.cgw", std::ios::binary) << bytes;
  ParameterStore same = ps;
  try {
    load_checkpoint((dir / "bad.cgw").string(), same);
    FAIL();
  } catch (const cgg::DataError& e) {
    EXPECT_NE(std::string(e.what()).find("magic"), std::string::npos);
  }
  std::ofstream(dir / "short.cgw", std::ios::binary) << slurp(path).substr(0, 30);
  EXPECT_THROW(load_checkpoint((dir / "short.cgw").string(), same), cgg::DataError);
  fs::remove_all(dir);
}
