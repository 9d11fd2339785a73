#pragma once

#include <iosfwd>

namespace singlab {

// Fast invariant sweep over every module; prints one line per check and
// returns the number of failures.
int run_selftest(std::ostream& os);

}  // namespace singlab
