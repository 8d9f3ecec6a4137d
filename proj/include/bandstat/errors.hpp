#pragma once

#include <stdexcept>

namespace bandstat {

// Caller passed something outside an operation's contract.  The CLI maps
// these to exit code 1.
struct argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numeric failure at runtime: non-convergence, eigensolver breakdown, a
// denominator sign change where none is admissible.  CLI exit code 2.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem or serialization failure.  CLI exit code 2.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation invoked on an object missing required state (e.g. a matrix
// function from a spectrum decomposed without eigenvectors).
struct state_error : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace bandstat
