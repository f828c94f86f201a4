#pragma once

#include <string>
#include <vector>

namespace dsc {

/// Entry point behind the `dsc` binary. Subcommands: generate, init, learn,
/// eval, experiment. Returns 0 on success, 1 on usage errors, 2 on runtime
/// errors.
int cli_main(const std::vector<std::string>& args);
int cli_main(int argc, const char* const* argv);

}  // namespace dsc
