// Copyright 2026 The LDHD Toolkit Authors
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

// Command-line entry point:
//   ldhd verify <suite> [flags]
//   ldhd gen [flags]
//   ldhd pe bias [flags]
//   ldhd report merge <files...> [flags]
// Exit status is 0 on pass, 1 on a failed verification, 2 on usage errors.

#ifndef LDHD_CLI_H_
#define LDHD_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace ldhd::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ldhd::cli

#endif  // LDHD_CLI_H_
