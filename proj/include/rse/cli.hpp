#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rse {

// Version string baked in at configure time (git describe when available).
std::string artifact_version();

// Entry point of the rse_lab tool. Returns the process exit code:
// 0 success, 1 validation/domain/node/winding, 2 non-finite/stability,
// 3 I/O. Output goes to `out`, diagnostics to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace rse
