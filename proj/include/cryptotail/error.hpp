#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cryptotail {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data is unusable: malformed, empty, too short, or degenerate.
class DataError : public Error {
public:
    using Error::Error;
};

/// A numeric routine failed to produce a finite answer.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Raised in strict ingest mode for the first malformed line.
class IngestError : public DataError {
public:
    IngestError(std::size_t line, std::string field, const std::string& what)
        : DataError("line " + std::to_string(line) + ", field '" + field + "': " + what),
          line_(line), field_(std::move(field)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

}  // namespace cryptotail
