// Copyright 2026 The cavqnd Authors
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

#ifndef CAVQND_CLI_HPP
#define CAVQND_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace cavqnd {

// Process exit codes of the command-line driver.
namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kInternal = 1;
inline constexpr int kConfig = 2;
inline constexpr int kPhysics = 3;   // stability, geometry or sign violation
inline constexpr int kVerify = 4;
inline constexpr int kAliasing = 5;
}  // namespace exit_code

/// Runs one command (derive, verify, qnd, sweep). args excludes the program
/// name. Every run leaves manifest.json next to its outputs.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace cavqnd

#endif  // CAVQND_CLI_HPP
