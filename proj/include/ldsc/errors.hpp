#pragma once

#include <stdexcept>
#include <string>

namespace ldsc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside an operation's precondition (length mismatch, bad index, p ∉ (0,1), ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Instance too large for exact enumeration or for a fixed-width field.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A planner could not meet its budget. Carries the diagnostics in the message.
class PlanningError : public Error {
public:
    using Error::Error;
};

/// Malformed or unsupported serialized container.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace ldsc
