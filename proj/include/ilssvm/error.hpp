#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ilssvm {

// Base of every error the library raises. The CLI reports kind() and what()
// on a single line.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

class ParseError : public Error {
public:
  ParseError(std::size_t offset, const std::string& message)
      : Error("offset " + std::to_string(offset) + ": " + message), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }
  const char* kind() const noexcept override { return "parse_error"; }

private:
  std::size_t offset_;
};

class EvalError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "eval_error"; }
};

class DataError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "data_error"; }
};

class SolveError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "solve_error"; }
};

class ConfigError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "config_error"; }
};

}  // namespace ilssvm
