// Copyright 2026 The stancekit Authors
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

#ifndef STANCEKIT_TOOLS_CLI_H_
#define STANCEKIT_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace stancekit::cli {

// Runs one stancekit command. Returns 0 on success, 1 on runtime failure and
// 2 on invalid usage. `in` feeds commands that read standard input.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace stancekit::cli

#endif  // STANCEKIT_TOOLS_CLI_H_
