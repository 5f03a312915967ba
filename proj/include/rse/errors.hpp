#pragma once

#include <stdexcept>
#include <string>

namespace rse {

// Process exit codes used by the CLI; every library error maps onto one.
enum class ExitCode : int { ok = 0, validation = 1, numeric = 2, io = 3 };

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual ExitCode exit_code() const { return ExitCode::numeric; }
};

// Bad input: schema violations, unmet preconditions, malformed grids.
class ValidationError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::validation; }
};

// Argument outside the real branch of the G function or its symbol.
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Wave function amplitude below the floor where the phase is undefined.
class NodeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Phase winding not compatible with the periodic domain.
class WindingError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NonFiniteError : public Error {
public:
    using Error::Error;
};

class StabilityError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::io; }
};

}  // namespace rse
