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


#include "cgg/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgg/benchkit/baselines.hpp"
#include "cgg/benchkit/evaluate.hpp"
#include "cgg/benchkit/synth.hpp"
#include "cgg/benchkit/table.hpp"
#include "cgg/core/dataset_io.hpp"
#include "cgg/core/error.hpp"
#include "cgg/core/stats.hpp"
#include "cgg/grounder/losses.hpp"
#include "cgg/grounder/trainer.hpp"
#include "cgg/numcore/grad_check.hpp"
#include "cgg/rulekit/pipeline.hpp"

namespace cgg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kGradTolerance = 1e-4;

// A directory argument means <dir>/dataset.json.
fs::path dataset_in(const std::string& arg) {
  const fs::path p(arg);
  return fs::is_directory(p) ? p / "dataset.json" : p;
}

fs::path dataset_out(const std::string& arg) {
  fs::path p(arg);
  if (arg.ends_with('/') || fs::is_directory(p)) {
    fs::create_directories(p);
    return p / "dataset.json";
  }
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw DataError("cannot write " + path.string());
}

std::string config_sidecar(const std::string& checkpoint) { return checkpoint + ".cfg"; }

struct Context {
  std::ostream& out;
  std::ostream& err;
};

// ---- transform / filter / stats / synth ----

struct TransformArgs {
  std::string data, rules, out;
  std::uint64_t seed = 0;
  int workers = 1;
};

void cmd_transform(const TransformArgs& a, Context& ctx) {
  const auto corpus = rulekit::read_qa_corpus(a.data);
  const rulekit::RuleSet rules = a.rules.empty() ? rulekit::default_rules() : rulekit::load_rules(a.rules);
  rulekit::SplitSpec split;
  split.seed = a.seed;
  const auto result = rulekit::run_pipeline(corpus.pairs, corpus.header, rules, split, a.workers);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  core::write_dataset(result.train, dir / "train.json");
  core::write_dataset(result.validation, dir / "validation.json");
  core::write_dataset(result.test, dir / "test.json");
  ctx.out << rulekit::pipeline_report_to_json(result.report).dump(2) << "\n";
}

void cmd_filter(const std::string& data, const std::string& out, Context& ctx) {
  const auto ds = core::read_dataset(dataset_in(data), core::Validation::kStructural);
  const auto result = rulekit::filter_dataset(ds);
  core::write_dataset(result.kept, dataset_out(out));
  ctx.out << rulekit::filter_report_to_json(result).dump(2) << "\n";
}

void cmd_stats(const std::string& data, Context& ctx) {
  const auto ds = core::read_dataset(dataset_in(data));
  ctx.out << core::stats_to_json(core::dataset_stats(ds.samples)).dump(2) << "\n";
}

void cmd_synth(const bench::SynthConfig& sc, const std::string& out, Context& ctx) {
  const auto ds = bench::synth_generate(sc);
  const fs::path path = dataset_out(out);
  core::write_dataset(ds, path);
  ctx.out << json{{"path", path.string()}, {"samples", ds.samples.size()}, {"seed", sc.seed}}.dump(2)
          << "\n";
}

// ---- train / eval / baseline ----

struct ModelOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  bool no_context_objects = false;
  std::optional<int> workers;

  void apply(grounder::ExperimentConfig& cfg) const {
    if (seed) {
      cfg.model.seed = *seed;
      cfg.model.encoder.seed = *seed;
    }
    if (lambda) cfg.model.lambda = *lambda;
    if (no_context_objects) cfg.model.use_context_objects = false;
    if (workers) cfg.schedule.workers = *workers;
  }
};

void fit_d_vis(grounder::ModelConfig& m, const core::DatasetHeader& header) {
  if (m.d_vis == 0) {
    m.d_vis = header.d_vis;
  } else if (m.d_vis != header.d_vis) {
    throw DataError("dataset d_vis " + std::to_string(header.d_vis) + " does not match config d_vis " +
                    std::to_string(m.d_vis));
  }
}

struct TrainArgs {
  std::string data, config, out, log;
  ModelOverrides overrides;
};

void cmd_train(const TrainArgs& a, Context& ctx) {
  auto cfg = grounder::load_config(a.config);
  a.overrides.apply(cfg);
  const auto ds = core::read_dataset(dataset_in(a.data));
  fit_d_vis(cfg.model, ds.header);
  cfg.model.validate();
  cfg.schedule.validate();

  grounder::GroundingModel model(cfg.model, grounder::Vocab::build(ds.samples, cfg.model.neutral_name_pool));
  std::string log;
  const auto steps = grounder::train(model, ds.samples, cfg.schedule, [&](const grounder::StepLog& s) {
    json line = {{"step", s.step}, {"epoch", s.epoch}, {"loss", s.loss},
                 {"batch_samples", s.batch_samples}, {"batch_tokens", s.batch_tokens}};
    log += line.dump() + "\n";
    if (s.step % 100 == 0 || s.step == cfg.schedule.steps) {
      ctx.err << "step " << s.step << " epoch " << s.epoch << " loss " << std::fixed
              << std::setprecision(4) << s.loss << std::defaultfloat << "\n";
    }
  });

  const fs::path ckpt(a.out);
  if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
  model.save(a.out);
  write_text(config_sidecar(a.out), grounder::format_config(cfg));
  const std::string log_path = a.log.empty() ? a.out + ".loss.jsonl" : a.log;
  write_text(log_path, log);
  ctx.out << json{{"checkpoint", a.out},
                  {"loss_log", log_path},
                  {"steps", steps.size()},
                  {"final_loss", steps.empty() ? json(nullptr) : json(steps.back().loss)}}
                 .dump(2)
          << "\n";
}

std::vector<bench::Assignment> baseline_predictions(const std::string& name, std::uint64_t seed,
                                                    const std::vector<core::Sample>& samples) {
  const auto b = bench::parse_baseline(name);
  std::vector<bench::Assignment> preds;
  preds.reserve(samples.size());
  for (const auto& s : samples) preds.push_back(bench::run_baseline(b, s, seed));
  return preds;
}

struct EvalArgs {
  std::string data, checkpoint, config, name, out;
  std::uint64_t seed = 0;
  int workers = 1;
};

void cmd_eval(const EvalArgs& a, Context& ctx) {
  if (a.checkpoint.empty() == a.name.empty()) {
    throw UsageError("eval needs exactly one of --checkpoint and --name");
  }
  const auto ds = core::read_dataset(dataset_in(a.data));
  std::vector<bench::Assignment> preds;
  std::string method;
  if (!a.name.empty()) {
    preds = baseline_predictions(a.name, a.seed, ds.samples);
    method = a.name;
  } else {
    auto cfg = grounder::load_config(a.config.empty() ? config_sidecar(a.checkpoint) : a.config);
    fit_d_vis(cfg.model, ds.header);
    const auto model = grounder::GroundingModel::load(a.checkpoint, cfg.model);
    for (const auto& p : grounder::predict_all(model, ds.samples, a.workers)) {
      preds.push_back(bench::to_assignment(p));
    }
    method = fs::path(a.checkpoint).filename().string();
  }
  const auto report = bench::evaluate(preds, ds.samples);
  const auto table = bench::render_table({{method, report}});
  ctx.err << table.text;
  if (!a.out.empty()) write_text(a.out, table.json.dump(2) + "\n");
  ctx.out << bench::report_to_json(report).dump(2) << "\n";
}

void cmd_baseline(const std::string& data, const std::string& name, std::uint64_t seed, Context& ctx) {
  const auto ds = core::read_dataset(dataset_in(data));
  const auto report = bench::evaluate(baseline_predictions(name, seed, ds.samples), ds.samples);
  json j = bench::report_to_json(report);
  j["chance"] = bench::chance_accuracy(ds.samples);
  ctx.out << j.dump(2) << "\n";
}

// ---- gradcheck ----

json grad_json(const num::GradCheckReport& r) {
  return {{"max_rel_error", r.max_rel_error},
          {"max_rel_error_significant", r.max_rel_error_significant},
          {"worst_param", r.worst_param},
          {"worst_index", r.worst_index},
          {"entries", r.entries_checked}};
}

// Returns true if every loss is within tolerance on its significant entries.
bool cmd_gradcheck(const std::string& config, std::uint64_t seed, Context& ctx) {
  auto cfg = grounder::load_config(config);
  bench::SynthConfig sc;
  sc.n_samples = 1;
  sc.context_rate = 1.0;
  sc.seed = seed;
  if (cfg.model.d_vis == 0) cfg.model.d_vis = sc.d_vis;
  sc.d_vis = std::max(sc.d_vis, cfg.model.d_vis);
  cfg.model.validate();
  // The probe scene only needs plausible inputs, so features are cut to the
  // configured width.
  auto ds = bench::synth_generate(sc);
  auto& sample = ds.samples.front();
  for (auto& p : sample.image.persons) p.feature.resize(cfg.model.d_vis);
  for (auto& o : sample.image.context_objects) o.feature.resize(cfg.model.d_vis);

  grounder::GroundingModel model(cfg.model, grounder::Vocab::build(ds.samples, cfg.model.neutral_name_pool));
  std::vector<std::string> names = {"cls"};
  if (cfg.model.lambda != 0.0) names.push_back("con");
  names.push_back("total");
  const auto reports = num::grad_check_multi(
      [&](num::ParamBinder& p) {
        const auto parts = grounder::loss_total(p, model, sample);
        std::vector<num::Var> v = {parts.cls};
        if (parts.con) v.push_back(*parts.con);
        v.push_back(parts.total);
        return v;
      },
      model.params());

  json losses = json::object();
  double worst = 0.0, worst_sig = 0.0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    losses[names[i]] = grad_json(reports[i]);
    worst = std::max(worst, reports[i].max_rel_error);
    worst_sig = std::max(worst_sig, reports[i].max_rel_error_significant);
  }
  const bool ok = worst_sig < kGradTolerance;
  ctx.out << json{{"losses", losses},
                  {"max_rel_error", worst},
                  {"max_rel_error_significant", worst_sig},
                  {"tolerance", kGradTolerance},
                  {"passed", ok}}
                 .dump(2)
          << "\n";
  return ok;
}

void print_error(std::ostream& err, const char* kind, const std::string& detail) {
  err << json{{"error", kind}, {"detail", detail}}.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  CLI::App app{"Grounding dataset pipeline, training and evaluation", "cgg"};
  app.require_subcommand(1);

  TransformArgs transform;
  auto* c_transform = app.add_subcommand("transform", "QA corpus + rules -> train/validation/test datasets");
  c_transform->add_option("--data", transform.data, "QA corpus JSON")->required();
  c_transform->add_option("--rules", transform.rules, "Rule file (default: built-in rules)");
  c_transform->add_option("--out", transform.out, "Output directory")->required();
  c_transform->add_option("--seed", transform.seed, "Split seed")->capture_default_str();
  c_transform->add_option("--workers", transform.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  std::string filter_data, filter_out;
  auto* c_filter = app.add_subcommand("filter", "Apply the sample filters to a dataset");
  c_filter->add_option("--data", filter_data, "Dataset file or directory")->required();
  c_filter->add_option("--out", filter_out, "Output dataset file or directory")->required();

  std::string stats_data;
  auto* c_stats = app.add_subcommand("stats", "Dataset statistics as JSON");
  c_stats->add_option("--data", stats_data, "Dataset file or directory")->required();

  bench::SynthConfig synth;
  std::string synth_out;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic grounding dataset");
  c_synth->add_option("--n", synth.n_samples, "Number of scenes")->capture_default_str();
  c_synth->add_option("--max-persons", synth.max_persons, "Persons per scene, 2..10")->capture_default_str();
  c_synth->add_option("--context-rate", synth.context_rate, "Share of context-object scenes")->capture_default_str();
  c_synth->add_option("--d-vis", synth.d_vis, "Region feature width")->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  c_synth->add_option("--out", synth_out, "Output dataset file or directory")->required();

  TrainArgs train;
  std::uint64_t train_seed = 0;
  double train_lambda = 0.0;
  int train_workers = 1;
  auto* c_train = app.add_subcommand("train", "Train a grounding model");
  c_train->add_option("--data", train.data, "Training dataset")->required();
  c_train->add_option("--config", train.config, "Experiment config")->required();
  c_train->add_option("--out", train.out, "Checkpoint path")->required();
  c_train->add_option("--log", train.log, "Loss log (default: <out>.loss.jsonl)");
  auto* o_seed = c_train->add_option("--seed", train_seed, "Override the config seed");
  auto* o_lambda = c_train->add_option("--lambda", train_lambda, "Override the contrastive weight")
                       ->check(CLI::NonNegativeNumber);
  c_train->add_flag("--no-context-objects", train.overrides.no_context_objects,
                    "Drop context objects from the input sequence");
  auto* o_workers = c_train->add_option("--workers", train_workers, "Worker threads")->check(CLI::PositiveNumber);

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a checkpoint or a baseline");
  c_eval->add_option("--data", eval.data, "Evaluation dataset")->required();
  c_eval->add_option("--checkpoint", eval.checkpoint, "Model checkpoint");
  c_eval->add_option("--config", eval.config, "Experiment config (default: <checkpoint>.cfg)");
  c_eval->add_option("--name", eval.name, "Baseline name instead of a checkpoint");
  c_eval->add_option("--seed", eval.seed, "Seed for the random baseline")->capture_default_str();
  c_eval->add_option("--workers", eval.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  c_eval->add_option("--out", eval.out, "Write the result table as JSON here");

  std::string baseline_data, baseline_name;
  std::uint64_t baseline_seed = 0;
  auto* c_baseline = app.add_subcommand("baseline", "Evaluate a heuristic baseline");
  c_baseline->add_option("--data", baseline_data, "Evaluation dataset")->required();
  c_baseline->add_option("--name", baseline_name,
                         "random, big_to_small, left_to_right or left_to_right_topk")
      ->required();
  c_baseline->add_option("--seed", baseline_seed, "Seed for the random baseline")->capture_default_str();

  std::string gc_config;
  std::uint64_t gc_seed = 0;
  auto* c_gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of all losses");
  c_gradcheck->add_option("--config", gc_config, "Experiment config")->required();
  c_gradcheck->add_option("--seed", gc_seed, "Seed of the probe scene")->capture_default_str();

  try {
    if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
      print_error(err, "usage", std::string("unknown subcommand '") + argv[1] + "'");
      err << app.help();
      return kExitUsage;
    }
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      err << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      err << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      print_error(err, "usage", e.what());
      err << app.help();
      return kExitUsage;
    }

    if (*o_seed) train.overrides.seed = train_seed;
    if (*o_lambda) train.overrides.lambda = train_lambda;
    if (*o_workers) train.overrides.workers = train_workers;

    if (*c_transform) cmd_transform(transform, ctx);
    if (*c_filter) cmd_filter(filter_data, filter_out, ctx);
    if (*c_stats) cmd_stats(stats_data, ctx);
    if (*c_synth) cmd_synth(synth, synth_out, ctx);
    if (*c_train) cmd_train(train, ctx);
    if (*c_eval) cmd_eval(eval, ctx);
    if (*c_baseline) cmd_baseline(baseline_data, baseline_name, baseline_seed, ctx);
    if (*c_gradcheck && !cmd_gradcheck(gc_config, gc_seed, ctx)) {
      print_error(err, "numeric", "gradient check exceeded tolerance");
      return kExitNumeric;
    }
    return kExitOk;
  } catch (const UsageError& e) {
    print_error(err, "usage", e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    print_error(err, "data", e.what());
    return kExitData;
  } catch (const NumericError& e) {
    print_error(err, "numeric", e.what());
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    print_error(err, "data", e.what());
    return kExitData;
  } catch (const json::exception& e) {
    print_error(err, "data", e.what());
    return kExitData;
  }
}

}  // namespace cgg::cli
