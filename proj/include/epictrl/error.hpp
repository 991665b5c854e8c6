#pragma once

#include <stdexcept>
#include <string>

namespace epictrl {

enum class ErrorCode {
  Validation,  // bad input or violated precondition
  Parse,       // malformed input file
  TooLarge,    // instance exceeds an exhaustive-oracle cap
  Solver,      // LP iteration limit or other solver failure
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCode::Validation, what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class TooLargeError : public Error {
 public:
  explicit TooLargeError(const std::string& what)
      : Error(ErrorCode::TooLarge, what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what)
      : Error(ErrorCode::Solver, what) {}
};

}  // namespace epictrl
