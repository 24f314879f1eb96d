#pragma once

#include <iosfwd>

namespace dihedral {

const char* version() noexcept;

/// Runs the command line; returns the process exit code (0 ok, 1 usage,
/// 2 validation, 3 numerical).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dihedral
