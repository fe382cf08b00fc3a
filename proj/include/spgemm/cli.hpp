#ifndef SPGEMM_CLI_HPP
#define SPGEMM_CLI_HPP

#include <string>
#include <vector>

namespace spgemm {

// Exit codes: 0 success, 1 usage error, 2 I/O or parse error,
// 3 verification failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitVerifyFailed = 3;

// Runs the command-line tool on `args` (without the program name).
int run_cli(const std::vector<std::string>& args);

} // namespace spgemm

#endif
