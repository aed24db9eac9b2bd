#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace teachcert::cli {

/// Runs one command line (without the program name). Exit codes: 0 on
/// success (unknown verdicts included), 1 on AuditFailed or runtime failure,
/// 2 on configuration errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace teachcert::cli
