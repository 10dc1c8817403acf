#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quasiode {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression or document text. `offset` is a byte offset into the source.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Input that parses but violates a documented constraint (schema, hypotheses, ranges).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numeric evaluation that would produce a non-finite value or is undefined at the point.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Integration or root-finding failure.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Internal consistency check of the symbolic engine failed. Never valid output.
class AssertionError : public Error {
public:
    using Error::Error;
};

}  // namespace quasiode
