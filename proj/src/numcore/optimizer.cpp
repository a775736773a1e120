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


#include "cgg/numcore/optimizer.hpp"

#include <cmath>

#include "cgg/core/error.hpp"

namespace cgg::num {

AdamWState AdamWState::zeros_like(const ParameterStore& store) {
  AdamWState s;
  s.m = store.zero_grads();
  s.v = store.zero_grads();
  return s;
}

void adamw_step(ParameterStore& params, const Gradients& grads, AdamWState& state,
                const AdamWConfig& cfg) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw ShapeError("adamw_step: " + std::to_string(params.size()) + " parameters, " +
                     std::to_string(grads.size()) + " gradients, " +
                     std::to_string(state.m.size()) + " moment buffers");
  }
  for (std::size_t s = 0; s < params.size(); ++s) {
    require_same_shape(params[s].value, grads[s], "adamw_step gradient");
    require_same_shape(params[s].value, state.m[s], "adamw_step state");
    require_same_shape(params[s].value, state.v[s], "adamw_step state");
    if (!grads[s].all_finite()) {
      throw NumericError("non-finite gradient for parameter " + params[s].name);
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t s = 0; s < params.size(); ++s) {
    auto& p = params[s].value;
    const auto& g = grads[s];
    auto& m = state.m[s];
    auto& v = state.v[s];
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] -= cfg.lr * cfg.weight_decay * p[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      p[i] -= cfg.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.eps);
    }
  }
}

}  // namespace cgg::num
