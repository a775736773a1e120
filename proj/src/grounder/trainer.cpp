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


#include "cgg/grounder/trainer.hpp"

#include <cmath>
#include <random>

#include "cgg/core/error.hpp"
#include "cgg/core/parallel.hpp"
#include "cgg/grounder/losses.hpp"
#include "cgg/numcore/optimizer.hpp"

namespace cgg::grounder {

std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& order,
                                                   const std::vector<std::size_t>& tokens,
                                                   std::size_t budget) {
  std::vector<std::vector<std::size_t>> batches;
  std::vector<std::size_t> cur;
  std::size_t used = 0;
  for (std::size_t idx : order) {
    if (!cur.empty() && used + tokens[idx] > budget) {
      batches.push_back(std::move(cur));
      cur.clear();
      used = 0;
    }
    cur.push_back(idx);
    used += tokens[idx];
  }
  if (!cur.empty()) batches.push_back(std::move(cur));
  return batches;
}

namespace {

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace

std::vector<StepLog> train(GroundingModel& model, const std::vector<core::Sample>& samples,
                           const TrainSchedule& schedule,
                           const std::function<void(const StepLog&)>& on_step) {
  schedule.validate();
  if (samples.empty()) throw UsageError("train: empty dataset");
  std::vector<std::size_t> tokens(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    tokens[i] = layout_sample(model, samples[i]).length();
  }

  num::ParameterStore& params = model.params();
  num::AdamWState opt = num::AdamWState::zeros_like(params);
  std::mt19937_64 rng(model.config().seed ^ 0x7261696e5f736564ULL);
  std::vector<std::size_t> order(samples.size());
  std::vector<std::vector<std::size_t>> batches;
  std::size_t next_batch = 0;
  std::size_t epoch = 0;

  const std::size_t workers = static_cast<std::size_t>(std::max(schedule.workers, 1));
  std::vector<num::Gradients> scratch(workers);
  std::vector<double> losses(workers);
  std::vector<StepLog> curve;
  curve.reserve(schedule.steps);

  for (std::size_t step = 1; step <= schedule.steps; ++step) {
    if (next_batch == batches.size()) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      shuffle(order, rng);
      batches = make_batches(order, tokens, schedule.token_budget);
      next_batch = 0;
      ++epoch;
    }
    const auto& batch = batches[next_batch++];
    num::Gradients grads = params.zero_grads();
    double loss_sum = 0.0;
    std::size_t batch_tokens = 0;
    try {
      for (std::size_t start = 0; start < batch.size(); start += workers) {
        const std::size_t n = std::min(workers, batch.size() - start);
        parallel_for(n, static_cast<int>(workers), [&](std::size_t w) {
          num::Graph g;
          num::ParamBinder p(g, params);
          const LossParts parts = loss_total(p, model, samples[batch[start + w]]);
          g.backward(parts.total);
          scratch[w] = params.zero_grads();
          g.accumulate_param_grads(scratch[w]);
          losses[w] = g.scalar(parts.total);
        });
        for (std::size_t w = 0; w < n; ++w) {
          loss_sum += losses[w];
          for (std::size_t s = 0; s < grads.size(); ++s) {
            auto dst = grads[s].values();
            const auto src = scratch[w][s].values();
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
          }
          batch_tokens += tokens[batch[start + w]];
        }
      }
      const double inv = 1.0 / static_cast<double>(batch.size());
      for (auto& gr : grads) {
        for (double& v : gr.values()) v *= inv;
      }
      const double loss = loss_sum * inv;
      if (!std::isfinite(loss)) throw NumericError("loss is not finite");
      num::AdamWConfig adamw = schedule.adamw;
      adamw.lr = schedule.lr_at(step);
      num::adamw_step(params, grads, opt, adamw);
      StepLog log{step, epoch, loss, batch.size(), batch_tokens};
      curve.push_back(log);
      if (on_step) on_step(log);
    } catch (const NumericError& e) {
      throw NumericError("training step " + std::to_string(step) + ": " + e.what());
    }
  }
  return curve;
}

std::vector<core::Prediction> predict_all(const GroundingModel& model,
                                          const std::vector<core::Sample>& samples, int workers) {
  std::vector<core::Prediction> out(samples.size());
  parallel_for(samples.size(), workers, [&](std::size_t i) { out[i] = predict(model, samples[i]); });
  return out;
}

}  // namespace cgg::grounder
