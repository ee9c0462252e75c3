#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nnse {

// Malformed or inconsistent input data (files, lexicons, labels).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Parse failure at a known line of an input file.
class ParseError : public DataError {
public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

// Non-finite objective, undefined correlation and similar numerical breakdowns.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace nnse
