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


// The `cgg` command line: one binary, one subcommand per pipeline stage.
//
// stdout carries only JSON payloads. Logs, tables and usage text go to
// stderr. Failures print a single-line {"error", "detail"} object to stderr
// and map to exit codes 1 (usage), 2 (data) and 3 (numeric).

#pragma once

#include <iosfwd>

namespace cgg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one command line. `argv[0]` is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cgg::cli
