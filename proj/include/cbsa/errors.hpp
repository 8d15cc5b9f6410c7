#pragma once

#include <stdexcept>
#include <string>

namespace cbsa {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

/// Two components cannot be composed (overlapping state or output sets).
struct CompositionError : Error {
    using Error::Error;
};

/// A rate function or predicate read a variable that is not in the store.
struct MissingValue : Error {
    using Error::Error;
};

/// A value had the wrong runtime type for the requested accessor.
struct TypeMismatch : Error {
    using Error::Error;
};

/// A command or parameter violated its documented bounds.
struct BoundsError : Error {
    using Error::Error;
};

/// Backtracking was requested on an empty waypoint log.
struct EmptyLog : Error {
    using Error::Error;
};

/// No grid path exists between the requested cells.
struct Unreachable : Error {
    using Error::Error;
};

/// Scenario file could not be parsed.
struct ParseError : Error {
    using Error::Error;
};

/// Scenario parsed but violates a documented modeling assumption.
struct ValidationError : Error {
    using Error::Error;
};

/// Static contract discharge failed for an assembled system.
struct DischargeError : Error {
    using Error::Error;
};

} // namespace cbsa
