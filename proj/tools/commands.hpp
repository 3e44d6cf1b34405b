#pragma once
#include <iosfwd>
#include <string>
#include <vector>

namespace apgda::cli {

enum ExitCode { ok = 0, validation_error = 1, numerical_failure = 2 };

int dispatch(int argc, char** argv);

// same as dispatch, with captured streams (used by tests)
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace apgda::cli
