#pragma once

#include <stdexcept>
#include <string>

namespace radlearn {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem read/write failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Input data violates a documented invariant or precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Bad configuration document or command-line usage.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite value during a numeric computation (e.g. NaN loss).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace radlearn
