#pragma once
#include <stdexcept>
#include <string>

namespace envkit {

// Error taxonomy used across the library. Callers catch the base type or a
// specific subclass; the CLI maps these to exit code 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A function argument violates its documented precondition.
struct InvalidArgumentError : Error {
    using Error::Error;
};

// An action failed spec validation or is masked invalid in the current state.
struct InvalidActionError : Error {
    using Error::Error;
};

// The caller broke an API contract, e.g. stepped a terminal state.
struct ContractViolationError : Error {
    using Error::Error;
};

// Registry lookup failure. Message lists nearest matches.
struct NotFoundError : Error {
    using Error::Error;
};

// Duplicate registration.
struct ConflictError : Error {
    using Error::Error;
};

// Malformed input file. Message carries the line number.
struct ParseError : Error {
    using Error::Error;
};

} // namespace envkit
