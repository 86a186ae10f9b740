// Copyright 2026 The xmrag Authors
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

#include <ostream>

#include "config.h"

namespace xmrag::cli {

//! Exit status of `generate` when no retrieved image satisfies a subquery.
inline constexpr int kExitNothingToGenerate = 4;

/*! Parses argv and runs one subcommand. Reports go to `out`, notices,
 *  warnings and log lines to `err`. Returns the process exit code: 0
 *  success, 1 usage error, 2 data error, 3 service error,
 *  kExitNothingToGenerate for an empty generation.
 */
int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err,
           const EnvLookup &env = GetEnv);

}  // namespace xmrag::cli
