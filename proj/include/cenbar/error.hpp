#pragma once

#include <stdexcept>
#include <string>

namespace cenbar {

// Exception taxonomy. The C API maps each class onto a status code and the
// CLI onto an exit code, so throw the most specific one that applies.

/// Malformed or out-of-contract input (bad CSV cell, event code, k out of range).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input is well formed but statistically degenerate (constant column, empty grid).
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A linear solve failed or a quantity that must be finite was not.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cenbar
