#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sscc::cli {

/// Runs one sscc command line (args exclude the program name).
/// Returns 0 on success, 1 on pipeline errors, 2 on usage errors and 3 when
/// `validate` measures validity below --min-validity.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sscc::cli
