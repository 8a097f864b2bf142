#pragma once

/// \file cli.hpp
/// Command-line driver for the turbulent-foliation toolkit. The driver is a
/// library function so tests can invoke it in-process with captured streams;
/// the installed binary is a thin wrapper.
///
/// Exit-code contract:
///   0  success; the machine-readable JSON result is on stdout (traces write
///      CSV to --out, or to stdout when --out is absent)
///   1  usage or input error (unknown flags, malformed numbers or files,
///      structurally invalid data)
///   2  verification failure (an Abel-condition violation with its measured
///      defect reported, an identity residual above tolerance, or a numeric
///      verification routine that failed to converge)
///
/// Output is deterministic: fixed JSON field order, 17-significant-digit
/// floats, and seeded sampling, so repeated invocations with the same
/// arguments are byte-identical.

#include <iosfwd>
#include <string>
#include <vector>

namespace turbulent::cli {

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace turbulent::cli
