#pragma once

#include <iosfwd>

namespace mgt::cli {

/// Runs one `mgt` subcommand and returns the process exit code: 0 on success, 1 on a
/// usage or validation error, 2 on an I/O error. Every output file is written only after
/// all inputs have been read and validated; a successful run appends one JSON line to
/// <out>/manifests.jsonl.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace mgt::cli
