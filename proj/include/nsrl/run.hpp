#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace nsrl {

struct RunOptions {
    std::string subcommand;  ///< simulate | verify-pressure | structure | criteria | report
    std::string config_path;
    std::string out_dir;  ///< overrides output.dir from the config
    int refine = 0;       ///< quadrature refinement doublings for verify-pressure
    std::optional<std::uint64_t> seed;  ///< overrides ic.seed
};

/// Executes one subcommand. Returns the process exit code: 0 ok, 2 config
/// error, 3 numerical failure, 4 I/O error. On failure an error.json record
/// is left in the output directory when that directory is known.
int run(const RunOptions& options);

} // namespace nsrl
