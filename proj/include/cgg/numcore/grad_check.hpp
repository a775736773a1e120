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


// Central-difference gradient checking against the reverse-mode graph.

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "cgg/numcore/encoder.hpp"

namespace cgg::num {

/// Builds a scalar loss on a fresh graph. Called many times; must be pure.
using LossBuilder = std::function<Var(ParamBinder&)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t entries_checked = 0;
  /// Same maximum over entries with max(|a|, |n|) >= 1e-6 only. Below that,
  /// rounding in the loss value alone can exceed 1e-4 relative at ε=1e-5.
  double max_rel_error_significant = 0.0;
};

struct GradCheckOptions {
  double epsilon = 1e-5;
  /// Applied to the analytic gradients before comparison (mutation tests).
  std::function<void(Gradients&)> corrupt;
};

/// For every parameter entry compares the analytic gradient `a` with
/// (loss(θ+ε) − loss(θ−ε)) / 2ε and reports max |a−n| / max(|a|,|n|,1e-8).
/// `params` is perturbed in place and restored before returning.
/// Throws UsageError for ε outside [1e-7, 1e-4], NumericError for a
/// non-finite loss.
GradCheckReport grad_check(const LossBuilder& loss, ParameterStore& params,
                           const GradCheckOptions& opts = {});

/// Several losses built on one graph; checks each against its own
/// finite differences while sharing the perturbed forward passes.
using MultiLossBuilder = std::function<std::vector<Var>(ParamBinder&)>;
std::vector<GradCheckReport> grad_check_multi(const MultiLossBuilder& losses, ParameterStore& params,
                                              const GradCheckOptions& opts = {});

}  // namespace cgg::num
