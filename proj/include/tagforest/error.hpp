#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "tagforest/report.hpp"

namespace tagforest {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed files, out-of-range parameters, inconsistent
// artifacts. The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(std::string source, std::size_t line, const std::string& message)
      : InputError(source + ":" + std::to_string(line) + ": " + message),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

class InvalidTreeError : public InputError {
 public:
  explicit InvalidTreeError(ValidationReport report)
      : InputError("invalid tag tree:\n" + report.to_string()), report_(std::move(report)) {}

  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

}  // namespace tagforest
