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


#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

#include <gtest/gtest.h>

#include "cgg/core/error.hpp"
#include "cgg/geometry/box_ops.hpp"
#include "cgg/grounder/config.hpp"
#include "cgg/grounder/losses.hpp"
#include "cgg/grounder/model.hpp"
#include "cgg/grounder/trainer.hpp"
#include "cgg/grounder/vocab.hpp"
#include "cgg/numcore/grad_check.hpp"
#include "fixtures/grounder_fixtures.hpp"
#include "test_util.hpp"

namespace cgg::grounder {
namespace {

using core::Sample;
using num::Tensor;
using num::Var;
using testing::make_sample;

ModelConfig small_config() {
  ModelConfig c;
  c.encoder.d_model = 8;
  c.encoder.n_heads = 2;
  c.encoder.n_layers = 2;
  c.encoder.d_ff = 16;
  c.encoder.init_std = 0.2;
  c.contrastive_layer = 1;
  c.d_vis = 4;
  c.max_text_len = 16;
  c.tau = 1.0;
  c.seed = 3;
  c.encoder.seed = 3;
  return c;
}

GroundingModel model_for(const std::vector<Sample>& samples, ModelConfig cfg = small_config()) {
  return GroundingModel(cfg, Vocab::build(samples, cfg.neutral_name_pool));
}

core::ContextObject object_at(core::BoundingBox box, std::size_t d_vis, float v = 0.5f) {
  core::ContextObject o;
  o.box = box;
  o.feature.assign(d_vis, v);
  o.class_name = "cup";
  return o;
}

std::vector<std::uint8_t> file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("cgg_grounder_" + name)).string();
}

// ---- config ----

TEST(ConfigTest, FormatParseRoundTrip) {
  ExperimentConfig c;
  c.model = small_config();
  c.model.lambda = 0.25;
  c.model.normalized_similarity = true;
  c.model.use_context_objects = false;
  c.schedule.steps = 17;
  c.schedule.adamw.lr = 3e-4;
  c.schedule.workers = 2;
  c.schedule.warmup_steps = 5;
  c.schedule.linear_decay = true;
  EXPECT_EQ(parse_config(format_config(c)), c);
}

TEST(ConfigTest, LearningRateSchedule) {
  TrainSchedule s;
  s.steps = 10;
  s.adamw.lr = 1.0;
  EXPECT_DOUBLE_EQ(s.lr_at(1), 1.0);
  EXPECT_DOUBLE_EQ(s.lr_at(10), 1.0);
  s.warmup_steps = 4;
  EXPECT_DOUBLE_EQ(s.lr_at(1), 0.25);
  EXPECT_DOUBLE_EQ(s.lr_at(4), 1.0);
  EXPECT_DOUBLE_EQ(s.lr_at(7), 1.0);
  s.linear_decay = true;
  EXPECT_DOUBLE_EQ(s.lr_at(2), 0.5 * 0.9);
  EXPECT_DOUBLE_EQ(s.lr_at(6), 0.5);
  EXPECT_DOUBLE_EQ(s.lr_at(10), 0.1);
  s.warmup_steps = 11;
  EXPECT_THROW(s.validate(), UsageError);
}

TEST(ConfigTest, UnknownKeyNamesLine) {
  try {
    parse_config("d_model = 8\nwidth = 3\n");
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ConfigTest, ValidateRejectsBadFields) {
  auto bad = [](auto mutate) {
    ModelConfig c = small_config();
    mutate(c);
    EXPECT_THROW(c.validate(), UsageError);
  };
  bad([](ModelConfig& c) { c.contrastive_layer = 3; });
  bad([](ModelConfig& c) { c.contrastive_layer = 0; });
  bad([](ModelConfig& c) { c.t1 = 1.5; });
  bad([](ModelConfig& c) { c.t2 = -0.1; });
  bad([](ModelConfig& c) { c.tau = 0.0; });
  bad([](ModelConfig& c) { c.lambda = -1.0; });
  bad([](ModelConfig& c) { c.neutral_name_pool.resize(9); });
  EXPECT_NO_THROW(small_config().validate());
}

TEST(ConfigTest, ShippedConfigsLoad) {
  for (const char* name : {"toy.cfg", "gradcheck.cfg"}) {
    SCOPED_TRACE(name);
    const auto c = load_config(std::string(CGG_CONFIG_DIR) + "/" + name);
    EXPECT_NO_THROW(c.model.validate());
    EXPECT_NO_THROW(c.schedule.validate());
  }
}

// ---- names and vocabulary ----

TEST(NamesTest, SameSeedSameName) {
  const std::vector<std::string> pool = {"james", "mary"};
  core::Description d{testing::toks("PERSON0 will leave")};
  const auto a = substitute_neutral_names(d, pool, "s1", 9);
  const auto b = substitute_neutral_names(d, pool, "s1", 9);
  EXPECT_EQ(a.words, b.words);
  EXPECT_TRUE(a.words[0] == "james" || a.words[0] == "mary");
  std::set<std::string> seen;
  for (int i = 0; i < 64; ++i) {
    seen.insert(substitute_neutral_names(d, pool, "s" + std::to_string(i), 9).words[0]);
  }
  EXPECT_EQ(seen.size(), 2u);
}

TEST(NamesTest, DistinctLinksGetDistinctNames) {
  const auto& pool = default_neutral_names();
  core::Description d{testing::toks("PERSON3 asks PERSON1 why PERSON3 left")};
  for (int i = 0; i < 50; ++i) {
    const auto n = substitute_neutral_names(d, pool, "s" + std::to_string(i), 1);
    ASSERT_EQ(n.link_ids, (std::vector<int>{3, 1}));
    EXPECT_NE(n.names.at(3), n.names.at(1));
    EXPECT_EQ(n.words[4], n.names.at(3));
    EXPECT_EQ(n.link_positions, (std::vector<std::size_t>{0, 2}));
  }
}

TEST(NamesTest, PoolExhaustedIsError) {
  core::Description d{testing::toks("PERSON0 and PERSON1 and PERSON2")};
  EXPECT_THROW(substitute_neutral_names(d, {"a", "b"}, "s", 0), UsageError);
}

TEST(NamesTest, ZeroLinksLeavesWords) {
  core::Description d{testing::toks("nobody is here")};
  const auto n = substitute_neutral_names(d, default_neutral_names(), "s", 0);
  EXPECT_EQ(n.words, (std::vector<std::string>{"nobody", "is", "here"}));
  EXPECT_TRUE(n.link_ids.empty());
}

TEST(NamesTest, MultiWordNamePointsAtFirstWord) {
  core::Description d{testing::toks("why does PERSON0 smile")};
  const auto n = substitute_neutral_names(d, {"mary ann"}, "s", 0);
  EXPECT_EQ(n.words, (std::vector<std::string>{"why", "does", "mary", "ann", "smile"}));
  EXPECT_EQ(n.link_positions, (std::vector<std::size_t>{2}));
}

TEST(VocabTest, BuildLookupSaveLoad) {
  const auto s = make_sample("v", 2, "PERSON0 Will LEAVE now", {{0, 1}});
  const Vocab v = Vocab::build({s}, {"james", "mary"});
  EXPECT_EQ(v.words().front(), Vocab::kUnknownWord);
  EXPECT_TRUE(v.contains("leave"));
  EXPECT_TRUE(v.contains("mary"));
  EXPECT_EQ(v.id_of("zebra"), Vocab::kUnknown);
  EXPECT_TRUE(std::is_sorted(v.words().begin() + 1, v.words().end()));
  const auto path = temp_path("vocab.txt");
  v.save(path);
  EXPECT_EQ(Vocab::load(path), v);
  std::filesystem::remove(path);
}

// ---- embedding ----

TEST(EmbedTest, SequenceLengthCountsTextAndPersons) {
  const auto s = make_sample("e", 3, "PERSON0 will leave", {{0, 1}});
  const auto m = model_for({s});
  num::Graph g;
  num::ParamBinder p(g, m.params());
  const auto enc = embed_sample(p, m, s);
  EXPECT_EQ(enc.layout.length(), 3u + 3u);
  EXPECT_EQ(g.value(enc.input).rows(), 6u);
  EXPECT_EQ(enc.hidden.size(), 2u);
}

TEST(EmbedTest, AllHundredContextObjectsIncluded) {
  auto s = make_sample("e", 2, "PERSON0 will leave", {{0, 0}});
  for (int c = 0; c < 100; ++c) s.image.context_objects.push_back(object_at({1, 1, 5, 5}, 4));
  auto m = model_for({s});
  EXPECT_EQ(layout_sample(m, s).length(), 3u + 2u + 100u);
  m.mutable_config().use_context_objects = false;
  EXPECT_EQ(layout_sample(m, s).length(), 5u);
}

TEST(EmbedTest, MissingFeatureNamesRegion) {
  auto s = make_sample("e", 2, "PERSON0 will leave", {{0, 0}});
  s.image.context_objects.push_back(object_at({1, 1, 5, 5}, 4));
  s.image.context_objects.push_back(object_at({1, 1, 5, 5}, 0));
  const auto m = model_for({s});
  num::Graph g;
  num::ParamBinder p(g, m.params());
  try {
    embed_sample(p, m, s);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("context object 1"), std::string::npos) << e.what();
  }
}

TEST(EmbedTest, ZeroProjectionsGiveLayerNormBias) {
  const auto s = make_sample("e", 2, "PERSON0 will leave", {{0, 0}});
  auto m = model_for({s});
  auto& ps = m.params();
  for (const char* n : {"feat_w", "feat_b", "loc_w", "loc_b"}) ps[ps.slot_of(n)].value.fill(0.0);
  auto& bias = ps[ps.slot_of("region_ln_b")].value;
  for (std::size_t k = 0; k < bias.size(); ++k) bias[k] = 0.1 * static_cast<double>(k) - 0.3;
  num::Graph g;
  num::ParamBinder p(g, m.params());
  const auto& r = g.value(embed_sample(p, m, s).region_embedding);
  for (std::size_t i = 0; i < r.rows(); ++i) {
    for (std::size_t k = 0; k < r.cols(); ++k) EXPECT_DOUBLE_EQ(r.at(i, k), bias[k]);
  }
}

TEST(EmbedTest, OverlongTextIsUsageError) {
  const auto s = make_sample("e", 2, "PERSON0 a b c d e f g h i j k l m n o p q", {{0, 0}});
  const auto m = model_for({s});
  EXPECT_THROW(layout_sample(m, s), UsageError);
}

// ---- classification ----

TEST(LogitsTest, IdentityWeightsGiveOneHotRow) {
  num::Graph g;
  Tensor eye({3, 3});
  for (std::size_t i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
  const Var t = g.constant(Tensor({1, 3}, {0, 1, 0}));
  const Var r = g.constant(eye);
  const auto& q = g.value(bilinear_logits(g, t, r, g.constant(eye), g.constant(eye)));
  EXPECT_EQ(q.storage(), (std::vector<double>{0, 1, 0}));
}

TEST(LogitsTest, ZeroW1GivesZeros) {
  num::Graph g;
  const Var t = g.constant(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
  const Var r = g.constant(Tensor({3, 3}, 0.5));
  const auto& q = g.value(bilinear_logits(g, t, r, g.constant(Tensor({3, 3})), g.constant(Tensor({3, 3}, 1.0))));
  for (double v : q.storage()) EXPECT_EQ(v, 0.0);
}

TEST(LogitsTest, ShapeIsLinksByPersons) {
  const auto s = make_sample("q", 3, "PERSON0 tells PERSON1 to go", {{0, 0}, {1, 2}});
  const auto m = model_for({s});
  num::Graph g;
  num::ParamBinder p(g, m.params());
  const auto& q = g.value(classification_logits(p, embed_sample(p, m, s)));
  EXPECT_EQ(q.rows(), 2u);
  EXPECT_EQ(q.cols(), 3u);
}

TEST(LossClsTest, ClosedForms) {
  {
    num::Graph g;
    EXPECT_NEAR(g.scalar(loss_cls(g, g.constant(Tensor({1, 1}, {4.2})), {0})), 0.0, 1e-12);
  }
  {
    num::Graph g;
    EXPECT_NEAR(g.scalar(loss_cls(g, g.constant(Tensor({1, 2}, {0.3, 0.3})), {1})), std::log(2.0), 1e-9);
  }
  {
    num::Graph g;
    const double got = g.scalar(loss_cls(g, g.constant(Tensor({2, 2}, {2, 0, 0, 1})), {0, 1}));
    const double oracle = 0.5 * (-std::log(std::exp(2.0) / (std::exp(2.0) + 1.0)) -
                                 std::log(std::exp(1.0) / (1.0 + std::exp(1.0))));
    EXPECT_NEAR(got, oracle, 1e-12);
    EXPECT_NEAR(got, 0.220095, 1e-6);
  }
}

TEST(LossClsTest, MissingLabelIsDataError) {
  const auto s = make_sample("m", 2, "PERSON0 and PERSON1 wave", {{0, 0}});
  EXPECT_THROW(link_targets(s, {0, 1}), DataError);
  EXPECT_THROW(select_context_objects(s, 0.3, 0.1), DataError);
}

// ---- context object selection ----

Sample two_person_scene() {
  Sample s;
  s.sample_id = "ctx";
  s.image.image_id = "img_ctx";
  s.image.width = 300;
  s.image.height = 100;
  for (int j = 0; j < 2; ++j) {
    core::PersonBox p;
    p.index = static_cast<std::size_t>(j);
    p.box = {100.0 * j, 0, 100.0 * j + 100, 100};
    p.feature.assign(4, 0.25f * static_cast<float>(j));
    s.image.persons.push_back(p);
  }
  s.description.tokens = testing::toks("PERSON0 holds the cup");
  s.labels.pairs[0] = 0;
  return s;
}

TEST(SelectTest, ThresholdExamples) {
  auto s = two_person_scene();
  s.image.context_objects.push_back(object_at({0, 0, 50, 100}, 4));    // IoU 0.5 with GT, 0 with other
  s.image.context_objects.push_back(object_at({50, 0, 150, 100}, 4));  // 1/3 with both
  const auto sets = select_context_objects(s, 0.3, 0.1);
  ASSERT_EQ(sets.links.size(), 1u);
  const auto& lc = sets.links[0];
  EXPECT_EQ(lc.context, (std::vector<std::size_t>{0}));
  EXPECT_DOUBLE_EQ(lc.context_weights[0], 0.5);
  EXPECT_EQ(lc.negatives, (std::vector<std::size_t>{1}));
  EXPECT_EQ(lc.num_positives(), 2u);
}

TEST(SelectTest, NoQualifyingObjectsLeavesOnlyGt) {
  auto s = two_person_scene();
  s.image.context_objects.push_back(object_at({200, 0, 300, 100}, 4));
  const auto sets = select_context_objects(s, 0.3, 0.1);
  EXPECT_TRUE(sets.links[0].context.empty());
  EXPECT_EQ(sets.links[0].num_positives(), 1u);
}

TEST(SelectTest, SetInvariantsAndMonotonicity) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto c = testing::grad_case(i);
    const double t1 = u(rng), t2 = u(rng);
    const auto base = select_context_objects(c.sample, t1, t2);
    const auto higher_t1 = select_context_objects(c.sample, t1 + 0.5 * (1 - t1) * u(rng), t2);
    const auto lower_t2 = select_context_objects(c.sample, t1, t2 * u(rng));
    for (std::size_t l = 0; l < base.links.size(); ++l) {
      const auto& lc = base.links[l];
      EXPECT_EQ(std::count(lc.negatives.begin(), lc.negatives.end(), lc.gt), 0);
      EXPECT_EQ(lc.negatives.size() + 1, c.sample.image.persons.size());
      for (double w : lc.context_weights) {
        EXPECT_GT(w, 0.0);
        EXPECT_LE(w, 1.0);
      }
      for (const auto* sub : {&higher_t1, &lower_t2}) {
        for (std::size_t obj : sub->links[l].context) {
          EXPECT_NE(std::find(lc.context.begin(), lc.context.end(), obj), lc.context.end());
        }
      }
    }
  }
}

// ---- contrastive loss ----

ContrastiveSets one_link(std::size_t gt, std::vector<std::size_t> negatives,
                         std::vector<std::size_t> context = {}, std::vector<double> weights = {}) {
  LinkContrast lc;
  lc.gt = gt;
  lc.negatives = std::move(negatives);
  lc.context = std::move(context);
  lc.context_weights = std::move(weights);
  return ContrastiveSets{{lc}};
}

TEST(LossConTest, UniformOverFour) {
  num::Graph g;
  const Var s = g.constant(Tensor({1, 4}, 0.7));
  EXPECT_NEAR(g.scalar(contrastive_from_scores(g, s, one_link(0, {1, 2, 3}), 4)), std::log(4.0), 1e-9);
}

TEST(LossConTest, OnePositiveOneNegative) {
  num::Graph g;
  const Var s = g.constant(Tensor({1, 2}, {1.0, 0.0}));
  const double got = g.scalar(contrastive_from_scores(g, s, one_link(0, {1}), 2));
  EXPECT_NEAR(got, std::log(1.0 + std::exp(-1.0)), 1e-12);
  EXPECT_NEAR(got, 0.313262, 1e-6);
}

TEST(LossConTest, WeightedContextPositive) {
  // Persons 0..2 with GT 0, one context object at column 3 with IoU 0.6.
  num::Graph g;
  const Var s = g.constant(Tensor({1, 4}, -0.2));
  const double got = g.scalar(contrastive_from_scores(g, s, one_link(0, {1, 2}, {0}, {0.6}), 3));
  EXPECT_NEAR(got, 0.8 * std::log(4.0), 1e-9);
  EXPECT_NEAR(got, 1.109035, 1e-6);
}

TEST(LossConTest, NonPositiveTauIsError) {
  auto s = two_person_scene();
  auto m = model_for({s});
  m.mutable_config().tau = 0.0;
  num::Graph g;
  num::ParamBinder p(g, m.params());
  const auto enc = embed_sample(p, m, s);
  EXPECT_THROW(loss_con(p, enc, select_context_objects(s, 0.3, 0.1), m.config()), UsageError);
}

// The gap to the limit is first order in (similarity spread) / tau.
TEST(LossConTest, LargeTauLimit) {
  for (int i = 0; i < 10; ++i) {
    const auto c = testing::grad_case(i);
    auto m = testing::grad_model(c);
    m.mutable_config().normalized_similarity = false;
    const auto sets = select_context_objects(c.sample, m.config().t1, m.config().t2);
    double limit = 0.0;
    for (const auto& lc : sets.links) {
      double wsum = 1.0;
      for (double w : lc.context_weights) wsum += w;
      const double np = static_cast<double>(lc.num_positives());
      limit += wsum / np * std::log(np + static_cast<double>(lc.negatives.size()));
    }
    limit /= static_cast<double>(sets.links.size());
    auto gap = [&](double tau) {
      m.mutable_config().tau = tau;
      num::Graph g;
      num::ParamBinder p(g, m.params());
      const auto enc = embed_sample(p, m, c.sample);
      return g.scalar(loss_con(p, enc, sets, m.config())) - limit;
    };
    const double g6 = gap(1e6), g7 = gap(1e7);
    EXPECT_NEAR(g7 * 10.0, g6, 1e-3 * std::abs(g6) + 1e-9);
    EXPECT_NEAR(gap(1e8), 0.0, 1e-6);
  }
}

TEST(LossConTest, LargeTauLimitOnUnitSpreadScores) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng() % 4, ctx = rng() % 4;
    std::vector<std::size_t> neg, pos;
    std::vector<double> w;
    for (std::size_t j = 1; j < n; ++j) neg.push_back(j);
    for (std::size_t c = 0; c < ctx; ++c) {
      pos.push_back(c);
      w.push_back(0.3 + 0.7 * (u(rng) + 0.4) / 0.8);
    }
    Tensor sims({1, n + ctx});
    for (std::size_t k = 0; k < n + ctx; ++k) sims.at(0, k) = u(rng) / 1e6;
    num::Graph g;
    const double got =
        g.scalar(contrastive_from_scores(g, g.constant(sims), one_link(0, neg, pos, w), n));
    double wsum = 1.0;
    for (double x : w) wsum += x;
    const double np = static_cast<double>(ctx + 1);
    EXPECT_NEAR(got, wsum / np * std::log(static_cast<double>(n + ctx)), 1e-6);
  }
}

TEST(LossConTest, LossesAreNonNegative) {
  for (int i = 0; i < 40; ++i) {
    const auto c = testing::grad_case(i);
    const auto m = testing::grad_model(c);
    num::Graph g;
    num::ParamBinder p(g, m.params());
    const auto parts = loss_total(p, m, c.sample);
    EXPECT_GE(g.scalar(parts.cls), 0.0);
    EXPECT_GE(g.scalar(*parts.con), 0.0);
  }
}

// ---- combined loss ----

TEST(LossTotalTest, LambdaZeroIsClassificationLoss) {
  auto c = testing::grad_case(5);
  c.config.lambda = 0.0;
  const auto m = testing::grad_model(c);
  num::Graph g1;
  num::ParamBinder p1(g1, m.params());
  const auto parts = loss_total(p1, m, c.sample);
  EXPECT_FALSE(parts.con.has_value());
  num::Graph g2;
  num::ParamBinder p2(g2, m.params());
  const auto enc = embed_sample(p2, m, c.sample);
  const double cls = g2.scalar(loss_cls(g2, classification_logits(p2, enc),
                                        link_targets(c.sample, enc.layout.link_ids)));
  EXPECT_EQ(g1.scalar(parts.total), cls);
}

TEST(LossTotalTest, LambdaOneIsSumOfParts) {
  auto c = testing::grad_case(7);
  c.config.lambda = 1.0;
  const auto m = testing::grad_model(c);
  num::Graph g1;
  num::ParamBinder p1(g1, m.params());
  const double total = g1.scalar(loss_total(p1, m, c.sample).total);
  num::Graph g2;
  num::ParamBinder p2(g2, m.params());
  const auto e2 = embed_sample(p2, m, c.sample);
  const double cls =
      g2.scalar(loss_cls(g2, classification_logits(p2, e2), link_targets(c.sample, e2.layout.link_ids)));
  num::Graph g3;
  num::ParamBinder p3(g3, m.params());
  const auto e3 = embed_sample(p3, m, c.sample);
  const double con = g3.scalar(
      loss_con(p3, e3, select_context_objects(c.sample, m.config().t1, m.config().t2), m.config()));
  EXPECT_NEAR(total, cls + con, 1e-9);
}

// ---- gradients ----

TEST(GradientTest, SuiteOfSeededToyConfigs) {
  for (int i = 0; i < 24; ++i) {
    const auto c = testing::grad_case(i);
    auto m = testing::grad_model(c);
    const auto reports = num::grad_check_multi(testing::grad_losses(m, c.sample), m.params());
    const char* names[] = {"cls", "con", "total"};
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_LT(reports[k].max_rel_error, 1e-4)
          << "case " << i << " loss " << names[k] << " at " << reports[k].worst_param << "["
          << reports[k].worst_index << "]";
    }
  }
}

TEST(GradientTest, WiderModelsOnSignificantEntries) {
  const std::pair<int, std::size_t> cases[] = {{0, 16}, {1, 16}, {2, 16}, {3, 32}};
  for (auto [i, d] : cases) {
    const auto c = testing::grad_case(i, d);
    auto m = testing::grad_model(c);
    for (const auto& r : num::grad_check_multi(testing::grad_losses(m, c.sample), m.params())) {
      EXPECT_LT(r.max_rel_error_significant, 1e-4) << "case " << i << " d=" << d;
      EXPECT_LT(r.max_rel_error, 1e-2) << "case " << i << " d=" << d;
    }
  }
}

TEST(GradientTest, CorruptedGradientIsCaught) {
  const auto c = testing::grad_case(1);
  auto m = testing::grad_model(c);
  num::GradCheckOptions opts;
  const std::size_t slot = m.params().slot_of("cls_w1");
  opts.corrupt = [slot](num::Gradients& g) { g[slot][3] = g[slot][3] * 1.5 + 1e-3; };
  EXPECT_GT(num::grad_check(testing::grad_loss_total(m, c.sample), m.params(), opts).max_rel_error, 0.3);
}

// ---- prediction ----

TEST(PredictTest, ChoosesArgmaxOfScores) {
  const auto s = make_sample("p", 4, "PERSON0 tells PERSON1 to go", {{0, 0}, {1, 3}});
  const auto m = model_for({s});
  const auto pred = predict(m, s);
  ASSERT_EQ(pred.links.size(), 2u);
  for (const auto& lp : pred.links) {
    EXPECT_EQ(lp.scores.size(), 4u);
    EXPECT_EQ(lp.chosen, core::argmax_lowest(lp.scores));
    auto shifted = lp.scores;
    for (double& v : shifted) v += 123.25;
    EXPECT_EQ(core::argmax_lowest(shifted), lp.chosen);
  }
}

TEST(PredictTest, PersonPermutationPermutesScores) {
  for (int i = 0; i < 20; ++i) {
    const auto c = testing::grad_case(i);
    const auto m = testing::grad_model(c);
    const std::size_t n = c.sample.image.persons.size();
    std::vector<std::size_t> perm(n);  // new position j holds old person perm[j]
    for (std::size_t j = 0; j < n; ++j) perm[j] = (j + 1) % n;
    Sample permuted = c.sample;
    std::vector<std::size_t> where(n);
    for (std::size_t j = 0; j < n; ++j) {
      permuted.image.persons[j] = c.sample.image.persons[perm[j]];
      permuted.image.persons[j].index = j;
      where[perm[j]] = j;
    }
    for (auto& [link, person] : permuted.labels.pairs) person = where[person];
    const auto a = predict(m, c.sample);
    const auto b = predict(m, permuted);
    for (std::size_t l = 0; l < a.links.size(); ++l) {
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_NEAR(b.links[l].scores[j], a.links[l].scores[perm[j]], 1e-9);
      }
      EXPECT_EQ(perm[b.links[l].chosen], a.links[l].chosen);
    }
  }
}

// ---- training ----

TEST(TrainTest, TokenBudgetBatching) {
  std::vector<std::size_t> order(250), tokens(250, 40);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto batches = make_batches(order, tokens, 4000);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0].size(), 100u);
  EXPECT_EQ(batches[2].size(), 50u);
  tokens[1] = 5000;
  const auto odd = make_batches({0, 1, 2}, tokens, 100);
  EXPECT_EQ(odd, (std::vector<std::vector<std::size_t>>{{0}, {1}, {2}}));
}

std::vector<Sample> tiny_corpus() {
  std::vector<Sample> out;
  for (int i = 0; i < 6; ++i) {
    out.push_back(make_sample("t" + std::to_string(i), 3, "PERSON0 will leave soon",
                              {{0, static_cast<std::size_t>(i % 3)}}));
  }
  return out;
}

TEST(TrainTest, SameSeedGivesIdenticalCheckpoints) {
  const auto data = tiny_corpus();
  TrainSchedule sched;
  sched.steps = 6;
  sched.token_budget = 21;  // 7 tokens each: three samples per batch, three epochs
  std::vector<std::string> paths;
  std::vector<std::vector<StepLog>> curves;
  for (int run = 0; run < 2; ++run) {
    auto m = model_for(data);
    curves.push_back(train(m, data, sched));
    paths.push_back(temp_path("det" + std::to_string(run) + ".ckpt"));
    m.save(paths.back());
  }
  EXPECT_EQ(curves[0].back().epoch, 3u);
  for (std::size_t k = 0; k < curves[0].size(); ++k) EXPECT_EQ(curves[0][k].loss, curves[1][k].loss);
  EXPECT_EQ(file_bytes(paths[0]), file_bytes(paths[1]));
  for (const auto& p : paths) {
    std::filesystem::remove(p);
    std::filesystem::remove(p + ".vocab");
  }
}

TEST(TrainTest, WorkerCountDoesNotChangeResult) {
  const auto data = tiny_corpus();
  TrainSchedule sched;
  sched.steps = 4;
  sched.token_budget = 40;
  auto a = model_for(data);
  auto b = model_for(data);
  train(a, data, sched);
  sched.workers = 3;
  train(b, data, sched);
  EXPECT_TRUE(a.params() == b.params());
}

TEST(TrainTest, OverfitsOneSample) {
  const std::vector<Sample> data = {make_sample("o", 3, "PERSON0 will leave", {{0, 2}})};
  auto cfg = small_config();
  cfg.lambda = 0.0;
  auto m = model_for(data, cfg);
  TrainSchedule sched;
  sched.steps = 200;
  const auto curve = train(m, data, sched);
  EXPECT_LT(curve.back().loss, curve.front().loss);
  EXPECT_EQ(predict(m, data[0]).links[0].chosen, 2u);
}

TEST(TrainTest, NonFiniteInputAbortsWithStep) {
  auto data = tiny_corpus();
  data[0].image.persons[1].feature[0] = std::nanf("");
  auto m = model_for(data);
  TrainSchedule sched;
  sched.steps = 10;
  sched.token_budget = 1000;
  try {
    train(m, data, sched);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos) << e.what();
  }
}

TEST(ModelTest, SaveLoadRoundTrip) {
  const auto data = tiny_corpus();
  const auto m = model_for(data);
  const auto path = temp_path("model.ckpt");
  const auto again = temp_path("model2.ckpt");
  m.save(path);
  const auto back = GroundingModel::load(path, m.config());
  back.save(again);
  EXPECT_EQ(file_bytes(path), file_bytes(again));
  EXPECT_EQ(back.vocab(), m.vocab());
  // Values are stored as float32.
  const auto a = predict(back, data[1]).links[0].scores;
  const auto b = predict(m, data[1]).links[0].scores;
  for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-5);
  for (const auto& p : {path, again}) {
    std::filesystem::remove(p);
    std::filesystem::remove(p + ".vocab");
  }
}

}  // namespace
}  // namespace cgg::grounder
