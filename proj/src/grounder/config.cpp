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


#include "cgg/grounder/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cgg/core/error.hpp"

namespace cgg::grounder {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t to_size(const std::string& v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw UsageError("expected an integer");
  return out;
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw UsageError("expected a number");
  }
  if (used != v.size()) throw UsageError("expected a number");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw UsageError("expected true or false");
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (item.empty()) throw UsageError("empty list entry");
    out.push_back(item);
  }
  return out;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s = {
      {"d_model", [](auto& c, auto& v) { c.model.encoder.d_model = to_size(v); }},
      {"n_heads", [](auto& c, auto& v) { c.model.encoder.n_heads = to_size(v); }},
      {"n_layers", [](auto& c, auto& v) { c.model.encoder.n_layers = to_size(v); }},
      {"d_ff", [](auto& c, auto& v) { c.model.encoder.d_ff = to_size(v); }},
      {"init_std", [](auto& c, auto& v) { c.model.encoder.init_std = to_double(v); }},
      {"ln_eps", [](auto& c, auto& v) { c.model.encoder.ln_eps = to_double(v); }},
      {"d_vis", [](auto& c, auto& v) { c.model.d_vis = to_size(v); }},
      {"max_text_len", [](auto& c, auto& v) { c.model.max_text_len = to_size(v); }},
      {"tau", [](auto& c, auto& v) { c.model.tau = to_double(v); }},
      {"t1", [](auto& c, auto& v) { c.model.t1 = to_double(v); }},
      {"t2", [](auto& c, auto& v) { c.model.t2 = to_double(v); }},
      {"lambda", [](auto& c, auto& v) { c.model.lambda = to_double(v); }},
      {"contrastive_layer", [](auto& c, auto& v) { c.model.contrastive_layer = to_size(v); }},
      {"normalized_similarity", [](auto& c, auto& v) { c.model.normalized_similarity = to_bool(v); }},
      {"use_context_objects", [](auto& c, auto& v) { c.model.use_context_objects = to_bool(v); }},
      {"neutral_names", [](auto& c, auto& v) { c.model.neutral_name_pool = to_list(v); }},
      {"seed",
       [](auto& c, auto& v) {
         c.model.seed = to_size(v);
         c.model.encoder.seed = c.model.seed;
       }},
      {"steps", [](auto& c, auto& v) { c.schedule.steps = to_size(v); }},
      {"token_budget", [](auto& c, auto& v) { c.schedule.token_budget = to_size(v); }},
      {"lr", [](auto& c, auto& v) { c.schedule.adamw.lr = to_double(v); }},
      {"beta1", [](auto& c, auto& v) { c.schedule.adamw.beta1 = to_double(v); }},
      {"beta2", [](auto& c, auto& v) { c.schedule.adamw.beta2 = to_double(v); }},
      {"adam_eps", [](auto& c, auto& v) { c.schedule.adamw.eps = to_double(v); }},
      {"weight_decay", [](auto& c, auto& v) { c.schedule.adamw.weight_decay = to_double(v); }},
      {"workers", [](auto& c, auto& v) { c.schedule.workers = static_cast<int>(to_size(v)); }},
      {"warmup_steps", [](auto& c, auto& v) { c.schedule.warmup_steps = to_size(v); }},
      {"linear_decay", [](auto& c, auto& v) { c.schedule.linear_decay = to_bool(v); }},
  };
  return s;
}

}  // namespace

const std::vector<std::string>& default_neutral_names() {
  static const std::vector<std::string> names = {
      "james", "mary",  "robert", "linda", "david", "susan", "daniel", "karen",
      "paul",  "nancy", "mark",   "betty", "kevin", "helen", "brian",  "laura",
      "jason", "emma",  "ryan",   "sarah"};
  return names;
}

void ModelConfig::validate() const {
  encoder.validate();
  if (!(tau > 0.0)) throw UsageError("tau must be positive");
  if (!(t1 >= 0.0 && t1 <= 1.0)) throw UsageError("t1 must lie in [0, 1]");
  if (!(t2 >= 0.0 && t2 <= 1.0)) throw UsageError("t2 must lie in [0, 1]");
  if (!(lambda >= 0.0)) throw UsageError("lambda must be non-negative");
  if (contrastive_layer < 1 || contrastive_layer > encoder.n_layers) {
    throw UsageError("contrastive_layer " + std::to_string(contrastive_layer) +
                     " outside [1, n_layers=" + std::to_string(encoder.n_layers) + "]");
  }
  if (neutral_name_pool.size() < 10) throw UsageError("neutral name pool needs at least 10 names");
  if (max_text_len == 0) throw UsageError("max_text_len must be positive");
}

double TrainSchedule::lr_at(std::size_t step) const {
  double f = 1.0;
  if (step <= warmup_steps) f = static_cast<double>(step) / static_cast<double>(warmup_steps);
  if (linear_decay) {
    f *= static_cast<double>(steps - std::min(step, steps) + 1) / static_cast<double>(steps);
  }
  return adamw.lr * f;
}

void TrainSchedule::validate() const {
  if (steps == 0) throw UsageError("steps must be positive");
  if (token_budget == 0) throw UsageError("token_budget must be positive");
  if (!(adamw.lr > 0.0)) throw UsageError("lr must be positive");
  if (!(adamw.beta1 >= 0.0 && adamw.beta1 < 1.0) || !(adamw.beta2 >= 0.0 && adamw.beta2 < 1.0)) {
    throw UsageError("betas must lie in [0, 1)");
  }
  if (!(adamw.eps > 0.0) || !(adamw.weight_decay >= 0.0)) {
    throw UsageError("adam_eps must be positive and weight_decay non-negative");
  }
  if (workers < 1) throw UsageError("workers must be at least 1");
  if (warmup_steps > steps) throw UsageError("warmup_steps exceeds steps");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    try {
      it->second(cfg, value);
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(line_no) + ": " + key + ": " + e.what());
    }
  }
  cfg.model.validate();
  cfg.schedule.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ExperimentConfig& c) {
  const auto& m = c.model;
  std::string names;
  for (const auto& n : m.neutral_name_pool) names += (names.empty() ? "" : ",") + n;
  std::ostringstream os;
  os << "d_model = " << m.encoder.d_model << "\n"
     << "n_heads = " << m.encoder.n_heads << "\n"
     << "n_layers = " << m.encoder.n_layers << "\n"
     << "d_ff = " << m.encoder.d_ff << "\n"
     << "init_std = " << fmt_double(m.encoder.init_std) << "\n"
     << "ln_eps = " << fmt_double(m.encoder.ln_eps) << "\n"
     << "d_vis = " << m.d_vis << "\n"
     << "max_text_len = " << m.max_text_len << "\n"
     << "tau = " << fmt_double(m.tau) << "\n"
     << "t1 = " << fmt_double(m.t1) << "\n"
     << "t2 = " << fmt_double(m.t2) << "\n"
     << "lambda = " << fmt_double(m.lambda) << "\n"
     << "contrastive_layer = " << m.contrastive_layer << "\n"
     << "normalized_similarity = " << (m.normalized_similarity ? "true" : "false") << "\n"
     << "use_context_objects = " << (m.use_context_objects ? "true" : "false") << "\n"
     << "neutral_names = " << names << "\n"
     << "seed = " << m.seed << "\n"
     << "steps = " << c.schedule.steps << "\n"
     << "token_budget = " << c.schedule.token_budget << "\n"
     << "lr = " << fmt_double(c.schedule.adamw.lr) << "\n"
     << "beta1 = " << fmt_double(c.schedule.adamw.beta1) << "\n"
     << "beta2 = " << fmt_double(c.schedule.adamw.beta2) << "\n"
     << "adam_eps = " << fmt_double(c.schedule.adamw.eps) << "\n"
     << "weight_decay = " << fmt_double(c.schedule.adamw.weight_decay) << "\n"
     << "workers = " << c.schedule.workers << "\n"
     << "warmup_steps = " << c.schedule.warmup_steps << "\n"
     << "linear_decay = " << (c.schedule.linear_decay ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace cgg::grounder
