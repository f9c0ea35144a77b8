// Copyright 2026 The ksynergy Authors
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

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ksyn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

/// Subcommand names accepted by cli_dispatch.
const std::vector<std::string>& cli_subcommands();

/// Edit distance between two strings.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// Runs one CLI invocation. `args` excludes the program name. Returns 0 on
/// success, 1 on usage errors, 2 when a pipeline stage fails.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ksyn
