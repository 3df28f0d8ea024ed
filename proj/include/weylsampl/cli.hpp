// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace weylsampl {

/// Runs the command-line front end. Exit codes: 0 success, 1 validation
/// error, 2 numerical failure.
int cli_run(const std::vector<std::string>& args);
int cli_run(int argc, const char* const* argv);

} // namespace weylsampl
