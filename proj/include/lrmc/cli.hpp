#ifndef LRMC_CLI_HPP
#define LRMC_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace lrmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;

// Version tag written into every JSON report.
inline constexpr int kReportSchemaVersion = 1;

// Runs `lrmc <subcommand> ...`. `args` excludes the program name. Normal
// output goes to `out`, diagnostics to `err`. Returns the process exit code:
// 0 on success, 1 for bad arguments, unreadable or malformed files, 2 when a
// solver fails numerically.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace lrmc::cli

#endif  // LRMC_CLI_HPP
