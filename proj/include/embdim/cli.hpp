#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace embdim::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kDomainError = 1,  // invalid flags, signature, or empty input
  kIoError = 2,
  kVerificationFailure = 3,
};

/// Runs one subcommand (roofline, table, curve, scan, verify-kernels).
/// args excludes the program name. Results go to `out` unless --output names
/// a file, which is written via a temporary and renamed only on success.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace embdim::cli
