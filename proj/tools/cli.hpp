#pragma once

#include <ostream>

namespace mcv::cli {

/// Entry point for the `mcv` tool; returns the process exit status.
///
///   mcv segment <image.pnm> -o <dir> [-c <config>] [flags]
///   mcv components <classes.pgm> -o <labels.pgm|labels.csv> [--neighborhood 4|8]
///   mcv rand <labels_a> <labels_b>
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcv::cli
