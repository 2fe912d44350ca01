// Copyright 2026 The absa Authors.
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

#ifndef ABSA_TOOLS_CLI_H_
#define ABSA_TOOLS_CLI_H_

#include <string>
#include <vector>

namespace absa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Parses and runs one `absa` invocation; returns the process exit status.
int run(int argc, const char* const* argv);
// Same, with args[0] being the program name.
int run(const std::vector<std::string>& args);

}  // namespace absa::cli

#endif  // ABSA_TOOLS_CLI_H_
