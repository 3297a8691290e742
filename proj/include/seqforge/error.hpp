#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seqforge {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGenotype : public Error {
public:
    using Error::Error;
};

class EmptySearchSpace : public Error {
public:
    using Error::Error;
};

class BadAlphabet : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class OracleProtocolError : public Error {
public:
    using Error::Error;
};

class CoordinateOutOfBounds : public Error {
public:
    using Error::Error;
};

class CassetteDoesNotFit : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed dataset input. `line()` is 1-based, 0 when not tied to a line.
class SchemaError : public Error {
public:
    SchemaError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace seqforge
