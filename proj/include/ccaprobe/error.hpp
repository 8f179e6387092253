#pragma once

#include <stdexcept>
#include <string>

namespace ccaprobe {

// Base of every error raised by the library. The exit code is what the CLI
// returns when the error escapes a subcommand.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept = 0;
};

// Invalid parameters or configuration.
class UsageError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 1; }
};

// Malformed, mismatched or degenerate data.
class DataError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// Divergence, non-convergence or non-finite results.
class NumericalError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

}  // namespace ccaprobe
