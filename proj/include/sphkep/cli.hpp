// sphkep/cli.hpp
//
// Command-line front end. run() never calls std::exit; it parses, dispatches
// and returns the process exit code: 0 success, 1 usage error, 2 numerical
// failure, 3 verification failure.
#pragma once

#include <iosfwd>

namespace sphkep::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sphkep::cli
