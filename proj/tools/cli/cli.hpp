#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 2;

/// Runs one `scenario-forge` invocation. `args` excludes the program name.
/// Failures print a single `ERROR:<code>:<detail>` line to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sforge::cli
