#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "conch/core.hpp"

namespace conch::cli {

/// Parses one decimal per line. A first non-blank line "#logit" marks the
/// series as logits; other lines starting with '#' and blank lines are
/// skipped. Errors name `source` and the line number.
Series read_series(std::istream& in, const std::string& source);

/// "-" reads standard input.
Series load_series(const std::string& path);

/// Runs the command line and returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace conch::cli
