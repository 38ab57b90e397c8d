#pragma once

namespace popspace {

// Parses and runs one CLI invocation. Exit codes: 0 ok, 1 usage or input
// error, 2 violation, 3 inconclusive-only findings. isometry-check exits
// 1 when the matrix is not an isometry.
int run_cli(int argc, const char* const* argv);

}  // namespace popspace
