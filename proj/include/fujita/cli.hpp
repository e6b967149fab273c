#pragma once

namespace fujita {

// Full command-line entry point. Returns the process exit code:
// 0 success, 2 validation error, 3 numerical failure, 4 inconclusive
// (classify instead encodes its verdict: 0 Divergent, 1 Convergent,
// 2 Inconclusive).
int run(int argc, const char* const* argv);

}  // namespace fujita
