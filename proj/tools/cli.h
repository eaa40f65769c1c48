// Copyright 2026 The ESAL Authors.
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

// The esal command line: gen, train, predict, score, inspect, gradcheck.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numeric failure,
// 4 data mismatch, 5 verification failure.

#ifndef ESAL_TOOLS_CLI_H_
#define ESAL_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace esal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitMismatch = 4;
inline constexpr int kExitVerify = 5;

// args excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace esal::cli

#endif  // ESAL_TOOLS_CLI_H_
