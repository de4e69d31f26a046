#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fos {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the range where a function is trusted.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Input is structurally valid but numerically degenerate (e.g. M vanishes on a probe grid).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A refinement ladder or a near-zero integral failed to settle.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// An iterative method ran out of iterations or step size.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A stated precondition (integrability conditions, grid resolution, ...) does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The grid does not resolve a requested length scale (e.g. mollifier radius below 2h).
class ResolutionError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// Config or file-format validation failure. `path()` names the offending field.
class ValidationError : public Error {
public:
    ValidationError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace fos
