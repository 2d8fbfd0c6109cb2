#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adaprune {

// Base of every error thrown by the library. The CLI maps the subclasses
// onto exit codes: DataError -> 2, NumericalError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

/// Operand shapes do not line up.
class ShapeError : public DataError {
public:
    using DataError::DataError;
};

/// A documented precondition was violated by the caller.
class PreconditionError : public DataError {
public:
    using DataError::DataError;
};

/// An index is out of range or refers to an already removed position.
class IndexError : public DataError {
public:
    using DataError::DataError;
};

/// Factorization or pivot failure. `pivot()` is the offending index.
class SingularityError : public NumericalError {
public:
    SingularityError(const std::string& what, std::size_t pivot)
        : NumericalError(what), pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

}  // namespace adaprune
