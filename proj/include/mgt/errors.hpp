#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mgt {

/// Root of every error thrown by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that violates a documented contract. The CLI maps this family to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A malformed line in a line-oriented input.
class ParseError : public ValidationError {
public:
    ParseError(std::size_t line, const std::string& what)
        : ValidationError("line " + std::to_string(line) + ": " + what), line_{line} {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A stylometric measure or document vector requested for text without words or sentences.
class UndefinedFeatureError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InsufficientDataError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Corrupt, truncated or version-mismatched binary artifact.
class FormatError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Filesystem failure. The CLI maps this to exit code 2.
class IoError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite parameter.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace mgt
