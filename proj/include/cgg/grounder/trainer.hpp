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


// Mini-batch training with token-budget batching.

#pragma once

#include <functional>
#include <vector>

#include "cgg/core/types.hpp"
#include "cgg/grounder/config.hpp"
#include "cgg/grounder/model.hpp"

namespace cgg::grounder {

struct StepLog {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double loss = 0.0;
  std::size_t batch_samples = 0;
  std::size_t batch_tokens = 0;
};

/// Splits `order` into consecutive batches whose summed token counts stay
/// within `budget`; a sample larger than the budget gets a batch of its own.
std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& order,
                                                   const std::vector<std::size_t>& tokens,
                                                   std::size_t budget);

/// Runs schedule.steps AdamW steps on the mean per-sample loss_total. Samples
/// are reshuffled each epoch from the model seed. Per-sample gradients may be
/// computed on schedule.workers threads; they are always summed in batch
/// order, so results do not depend on the worker count. Throws NumericError
/// tagged with the step number on a non-finite loss.
std::vector<StepLog> train(GroundingModel& model, const std::vector<core::Sample>& samples,
                           const TrainSchedule& schedule,
                           const std::function<void(const StepLog&)>& on_step = {});

std::vector<core::Prediction> predict_all(const GroundingModel& model,
                                          const std::vector<core::Sample>& samples, int workers = 1);

}  // namespace cgg::grounder
