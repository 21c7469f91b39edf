#pragma once

#include <stdexcept>
#include <string>

namespace ltcm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

// Bad input: malformed config, mismatched parameters, unknown fields.
class ValidationError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// Input is well formed but outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class PrecisionError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

// A mathematical property that must hold for the inputs failed to hold.
class InvariantError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

}  // namespace ltcm
