#pragma once

#include <iosfwd>

namespace reflsolve::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumericalFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Entry point shared by the executable and the tests. Reports go to `out`
/// unless --out names a file; diagnostics and usage go to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace reflsolve::cli
