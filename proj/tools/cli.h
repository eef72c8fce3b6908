// Copyright 2026 The seqcluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The seqcluster command-line tool: verify, schedule, sweep, fit and report.
// Exit status: 0 success, 1 verification or fit failure, 2 usage or
// configuration error.

#ifndef SEQCLUSTER_TOOLS_CLI_H
#define SEQCLUSTER_TOOLS_CLI_H

#include <ostream>
#include <string>
#include <vector>

namespace seqcluster::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the tool with `args` (without the program name).
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace seqcluster::cli

#endif  // SEQCLUSTER_TOOLS_CLI_H
