#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace seiar::cli {

/// Entry point behind the seiarsim tool. `args` excludes the program name.
/// Returns 0 on success, 1 on usage or validation errors, 2 on numeric failures.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Drops every `key = ...` line of `text` whose key is overridden, then appends
/// the overrides. Used to layer command-line flags over a config file.
std::string apply_overrides(const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& overrides);

} // namespace seiar::cli
