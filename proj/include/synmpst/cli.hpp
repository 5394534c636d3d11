// Command-line front end. Exit codes: 0 success, 1 semantic failure (type
// errors, ill-behaved MLTS, unsound exploration), 2 usage, parse, I/O or
// resource errors.

#pragma once

#include <ostream>

namespace synmpst {

int run_cli(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

}  // namespace synmpst
