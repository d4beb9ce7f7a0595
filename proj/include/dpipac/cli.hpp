#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dpipac::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,  // computation error or failed verification
  kUsage = 2,
};

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Runs one invocation. `args` excludes the program name. `seed_override`
/// carries DPIPAC_SEED when set; it replaces any config-file seed, and an
/// explicit --seed flag replaces both.
int run(const std::vector<std::string>& args, Streams streams,
        const std::optional<std::string>& seed_override = std::nullopt);

}  // namespace dpipac::cli
