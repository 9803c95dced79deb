// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. `run_cli` holds all logic so tests can drive it
// in-process; tools/nrp.cpp is a thin main().

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nrp {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitLimit = 2;
inline constexpr int kExitUsage = 64;

// `args` excludes the program name. Machine output goes to `out`,
// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nrp
