#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anchor {

// Parses and runs one command. args excludes the program name. Returns 0 on
// success, 1 when a library operation rejects the request (the message names
// the violated precondition), 2 on a usage error. All diagnostics go to err;
// results go to out or to the file named by --out. Relative --out paths are
// resolved against $ANCHOR_OUTPUT_DIR when that is set.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace anchor
