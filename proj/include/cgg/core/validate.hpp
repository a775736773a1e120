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

#pragma once

#include <optional>
#include <string>

#include "cgg/core/types.hpp"

namespace cgg::core {

enum class Validation {
  /// Geometry, features, labels and tokens are well formed. Used for
  /// intermediate records that still have to go through the filters.
  kStructural,
  /// Structural plus every finished-sample rule: 2 <= N <= 10, k >= 1,
  /// no object links, no tied links.
  kFinished,
};

/// Returns a message naming the violated rule, or nullopt if valid.
std::optional<std::string> check_sample(const Sample& sample, const DatasetHeader& header,
                                        Validation level = Validation::kFinished);

/// Throws DataError("sample <id>: <rule>") on the first violation.
void validate_sample(const Sample& sample, const DatasetHeader& header,
                     Validation level = Validation::kFinished);

/// True if two person links are joined by a bare "and"/"or".
bool has_tied_links(const TokenList& tokens);

}  // namespace cgg::core
