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


// Parameter checkpoints.
//
// Layout (little-endian): "CGW1", u32 tensor count, then per tensor the name
// (u32 length + bytes), u32 rank, u32 dims, float32 values.

#pragma once

#include <string>

#include "cgg/numcore/graph.hpp"

namespace cgg::num {

void save_checkpoint(const std::string& path, const ParameterStore& params);

/// Overwrites the values of `params`, which must already hold the same names
/// and shapes in the same order (as built from the model config). Throws
/// DataError naming the first mismatch; `params` is untouched on failure.
void load_checkpoint(const std::string& path, ParameterStore& params);

}  // namespace cgg::num
