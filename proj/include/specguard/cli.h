// Copyright 2026 The specguard Authors
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

#ifndef SPECGUARD_CLI_H_
#define SPECGUARD_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace specguard {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInternalError = 2;

// Runs one command line (without the program name). Artifacts named by
// --out are written atomically; without --out they go to `out`. Diagnostics
// go to `err`. Returns 0 on success, 1 on bad input or usage, 2 on an
// internal fault.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace specguard

#endif  // SPECGUARD_CLI_H_
