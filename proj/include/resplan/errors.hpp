#pragma once

#include <stdexcept>
#include <string>

namespace resplan {

// Rejected input: malformed files, schema violations, invalid parameter
// combinations. The CLI maps this to exit code 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A solver stopped at a configured limit (iterations, nodes, gap) without
// proving optimality or infeasibility. The CLI maps this to exit code 2.
struct SolverLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace resplan
