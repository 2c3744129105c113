#pragma once

#include <stdexcept>
#include <string>

namespace fanpack {

// An internal guarantee did not hold. Always a bug, never bad input.
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// A sorter was asked to place a value into an array with no room.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An adversary was asked for more values than it may issue.
struct ExhaustedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input that violates an operation's precondition.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace fanpack
