#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

namespace njexl::cli {

struct Options {
    /// Print prompts (stdin is a terminal).
    bool interactive = false;
    /// Environment seen by scripts (NJEXL_PATH, env()).
    std::unordered_map<std::string, std::string> env;
};

/// Entry point shared by main() and the tests. `args` excludes argv[0].
/// Exit codes: 0 success, 1 script error, 2 usage error.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        const Options& options);

/// True while `source` has open brackets, an open string or an open block
/// comment, i.e. the REPL should keep reading.
bool needs_more_input(const std::string& source);

}  // namespace njexl::cli
