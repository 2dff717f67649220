#pragma once

#include <stdexcept>
#include <string>

namespace dtn {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to meet its own accuracy check.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A Taylor jet in the normal coordinate is too short for the requested work.
class JetOrderError : public Error {
public:
    using Error::Error;
};

/// λ is too close to a Dirichlet eigenvalue of the interior problem.
class PencilError : public Error {
public:
    PencilError(const std::string& what, int mode) : Error(what), mode_(mode) {}
    int mode() const { return mode_; }

private:
    int mode_;
};

/// Finite data does not determine the requested quantity.
class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Clustering could not separate the candidate limit values.
class AmbiguityError : public Error {
public:
    AmbiguityError(const std::string& what, std::string diagnostics)
        : Error(what), diagnostics_(std::move(diagnostics)) {}
    const std::string& diagnostics() const { return diagnostics_; }

private:
    std::string diagnostics_;
};

} // namespace dtn
