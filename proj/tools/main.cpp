// SPDX-License-Identifier: Apache-2.0
#include "weylsampl/cli.hpp"

int main(int argc, char** argv) { return weylsampl::cli_run(argc, argv); }
