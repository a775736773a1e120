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


#include "cgg/numcore/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "cgg/core/error.hpp"

namespace cgg::num {

namespace {

std::vector<double> eval_losses(const MultiLossBuilder& losses, const ParameterStore& params) {
  Graph g;
  ParamBinder p(g, params);
  std::vector<double> out;
  for (Var v : losses(p)) {
    const double x = g.scalar(v);
    if (!std::isfinite(x)) throw NumericError("non-finite loss in gradient check");
    out.push_back(x);
  }
  return out;
}

}  // namespace

std::vector<GradCheckReport> grad_check_multi(const MultiLossBuilder& losses, ParameterStore& params,
                                              const GradCheckOptions& opts) {
  const double eps = opts.epsilon;
  if (!(eps >= 1e-7 && eps <= 1e-4)) {
    throw UsageError("grad_check epsilon " + std::to_string(eps) + " outside [1e-7, 1e-4]");
  }
  // One graph per loss for the analytic side, since backward runs once per graph.
  std::vector<Gradients> grads;
  for (std::size_t k = 0;; ++k) {
    Graph g;
    ParamBinder p(g, params);
    const std::vector<Var> vars = losses(p);
    if (k == 0 && vars.empty()) throw UsageError("grad_check: no losses");
    if (k == vars.size()) break;
    if (!std::isfinite(g.scalar(vars[k]))) throw NumericError("non-finite loss in gradient check");
    g.backward(vars[k]);
    grads.push_back(params.zero_grads());
    g.accumulate_param_grads(grads.back());
    if (opts.corrupt) opts.corrupt(grads.back());
  }

  std::vector<GradCheckReport> reports(grads.size());
  for (std::size_t s = 0; s < params.size(); ++s) {
    auto& value = params[s].value;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + eps;
      const auto up = eval_losses(losses, params);
      value[i] = saved - eps;
      const auto down = eval_losses(losses, params);
      value[i] = saved;
      for (std::size_t k = 0; k < reports.size(); ++k) {
        auto& report = reports[k];
        const double numeric = (up[k] - down[k]) / (2.0 * eps);
        const double analytic = grads[k][s][i];
        const double err = std::abs(analytic - numeric) /
                           std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        ++report.entries_checked;
        if (std::max(std::abs(analytic), std::abs(numeric)) >= 1e-6) {
          report.max_rel_error_significant = std::max(report.max_rel_error_significant, err);
        }
        if (err > report.max_rel_error || report.entries_checked == 1) {
          report.max_rel_error = err;
          report.worst_param = params[s].name;
          report.worst_index = i;
          report.analytic = analytic;
          report.numeric = numeric;
        }
      }
    }
  }
  return reports;
}

GradCheckReport grad_check(const LossBuilder& loss, ParameterStore& params,
                           const GradCheckOptions& opts) {
  return grad_check_multi([&](ParamBinder& p) { return std::vector<Var>{loss(p)}; }, params,
                          opts)[0];
}

}  // namespace cgg::num
