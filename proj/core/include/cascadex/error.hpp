#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cascadex {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input file is well-formed but has the wrong columns.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace cascadex
