// Copyright 2026 The LAQG Bench Authors. All Rights Reserved.
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

#include <string>
#include <vector>

namespace laqg::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitInternal = 3,
};

/// Entry point of the `laqg` tool. `args` includes the program name.
/// Subcommands: prepare-data, train, generate, evaluate, bin-report,
/// compare, serve-anneval. A JSON file given with --config may supply any
/// flag, either flat or under a section named after the subcommand; flags
/// on the command line take precedence.
int run(const std::vector<std::string>& args);

}  // namespace laqg::cli
