#pragma once

#include <ostream>

namespace textclust {

// Runs the built-in invariant checks, printing one PASS/FAIL line each.
// Returns the number of failed checks.
int run_selftest(std::ostream& out);

}  // namespace textclust
