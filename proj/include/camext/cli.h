#ifndef CAMEXT_CLI_H_
#define CAMEXT_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace camext {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;

// Name of the environment variable that overrides --seed when the flag is
// not given on the command line (it takes precedence over --config files).
inline constexpr const char* kSeedEnvVar = "CAMEXT_SEED";

// Entry point behind the `camext` binary. `args` excludes the program name,
// e.g. {"simulate", "--labels", "..."}.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace camext

#endif  // CAMEXT_CLI_H_
