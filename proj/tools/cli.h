// Copyright 2026 The cbmdetect Authors
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

#ifndef CBMDETECT_TOOLS_CLI_H_
#define CBMDETECT_TOOLS_CLI_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cbmdetect::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitStatFailure = 1;
inline constexpr int kExitConfigError = 2;

// Parses argv (argv[0] is the program name) and runs one verb. Summaries go
// to `out`; errors and usage text go to `err`.
int Dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

// Library operations reachable from each verb.
const std::map<std::string, std::vector<std::string>>& VerbOperations();

}  // namespace cbmdetect::cli

#endif  // CBMDETECT_TOOLS_CLI_H_
