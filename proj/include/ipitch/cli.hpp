// Copyright 2026 The ipitch Authors.
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
#include <string>
#include <vector>

namespace ipitch {

// Entry point behind the `ipitch` binary. Returns the process exit code:
// 0 success, 2 I/O, 3 parse or invalid input, 4 numerical failure. Errors
// are reported on `err` as `error: <category>: <message>`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Same, without the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ipitch
