#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bashsynth {

// Base of every error raised by the library. Callers that only need a
// diagnostic can catch this; the subclasses carry structured context.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t column)
      : Error(message + " (column " + std::to_string(column) + ")"), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& message, std::size_t line, std::string field)
      : Error("line " + std::to_string(line) + (field.empty() ? "" : ", field '" + field + "'") +
              ": " + message),
        line_(line),
        field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class FormatError : public Error {
 public:
  FormatError(const std::string& message, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ImportError : public Error {
  using Error::Error;
};
class SpecError : public Error {
  using Error::Error;
};
class PipeError : public Error {
  using Error::Error;
};
class InfeasibleProfile : public Error {
  using Error::Error;
};
class SandboxSetupError : public Error {
  using Error::Error;
};
class SafetyError : public Error {
  using Error::Error;
};
class EmptyInputError : public Error {
  using Error::Error;
};

// LLM endpoint failures.
class AuthError : public Error {
  using Error::Error;
};
class TransportError : public Error {
  using Error::Error;
};

}  // namespace bashsynth
