#ifndef RUIN_CLI_COMMANDS_HPP
#define RUIN_CLI_COMMANDS_HPP

#include <ostream>
#include <string>
#include <vector>

namespace ruin::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitNetProfit = 3,
    kExitCheck = 4,
};

/// Entry point of ruinctl; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ruin::cli

#endif  // RUIN_CLI_COMMANDS_HPP
