#pragma once
// Assertion helpers shared across the unit suites.

#include <cmath>
#include <string>

#include "resplan/errors.hpp"

namespace resplan::testing {

inline bool close_rel(double a, double b, double tol = 1e-6) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

inline bool close_abs(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol;
}

// Runs fn and reports whether it threw an InputError whose message contains
// needle. Any other outcome (no throw, other exception type) is a miss.
template <typename Fn>
bool rejects_with(const std::string& needle, Fn&& fn) {
  try {
    fn();
  } catch (const InputError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  } catch (...) {
    return false;
  }
  return false;
}

}  // namespace resplan::testing
