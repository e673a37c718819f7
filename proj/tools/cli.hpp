#pragma once

#include <iosfwd>

namespace bhit::cli {

/// Exit codes of `run`.
enum ExitCode : int {
    kOk = 0,
    kDomainError = 1,
    kNumericalError = 2,
    /// `verify` ran to completion and at least one row failed.
    kVerifyFailed = 3,
};

/// Parse argv and execute one subcommand. Data goes to `out` (or to the
/// --output file), diagnostics to `err`. Argument errors return the parser's
/// nonzero code after printing a usage hint.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bhit::cli
