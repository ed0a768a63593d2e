#pragma once

#include <stdexcept>
#include <string>

namespace padreg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Field shapes that disagree or are too small for an operation.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A force pair whose difference formulation has a zero denominator.
class DegenerateForceError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Raised when the objective becomes non-finite; the message carries the tail of the loss trace.
class SolverError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace padreg
