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


// Adam with decoupled weight decay.

#pragma once

#include <cstdint>
#include <vector>

#include "cgg/numcore/graph.hpp"

namespace cgg::num {

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

struct AdamWState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t step = 0;

  static AdamWState zeros_like(const ParameterStore& store);
  bool operator==(const AdamWState&) const = default;
};

/// One update in place:
///   p -= lr * wd * p
///   m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2
///   p -= lr * m_hat / (sqrt(v_hat) + eps)
/// Throws ShapeError on mismatched shapes, NumericError on a non-finite
/// gradient (the parameters are left untouched in both cases).
void adamw_step(ParameterStore& params, const Gradients& grads, AdamWState& state,
                const AdamWConfig& cfg);

}  // namespace cgg::num
