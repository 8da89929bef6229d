#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace causal::cli {

/// Runs one command line; `args[0]` is the program name. CSV goes to `out`
/// unless --out names a file, diagnostics to `err`.
/// Returns 0 when every row was computed, 1 when some row carries an error
/// and 2 for usage errors or unreadable inputs.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Names accepted by `repro`.
const std::vector<std::string>& repro_targets();

}  // namespace causal::cli
