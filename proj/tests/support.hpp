#pragma once

/**
 * @file support.hpp
 * @brief Shared helpers for the test suites (deterministic RNG wrappers).
 */

#include "krt/randomgen.hpp"

namespace krt::testing {

// Everything the tests need lives in krt/randomgen.hpp so that the CLI's
// `verify` suites draw from exactly the same generators.

}  // namespace krt::testing
