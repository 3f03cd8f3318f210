#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hgoe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument or configuration value outside its documented domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Malformed input file content. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Operation invalid in the object's current state (e.g. mutating a sealed graph).
class StateError : public Error {
public:
    using Error::Error;
};

/// Corrupt, truncated or incompatible index file.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Filesystem access failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace hgoe
