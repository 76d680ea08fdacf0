#pragma once

#include <stdexcept>
#include <string>

namespace textaug {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  ok = 0,
  config = 2,
  provider = 3,
  io = 4,
};

/// Base of every error raised by the library. Each subclass maps to one
/// process exit code so the CLI can translate failures uniformly.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode exit_code() const noexcept { return ExitCode::config; }
};

/// Bad configuration, unsupported option, or unsatisfiable request.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller violated a documented precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Input data that does not satisfy the record invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& detail);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A metric is mathematically undefined for the given input.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// Balanced selection could not reach the requested per-class count.
class BalanceError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, const std::string& detail);
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// Reports or prediction files that cannot be aligned with the gold data.
class ComparisonError : public Error {
 public:
  using Error::Error;
};

class ImportError : public Error {
 public:
  using Error::Error;
};

/// The remote backend could not be reached or kept failing after retries.
class ProviderUnavailableError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::provider; }
};

/// The backend answered, but the payload is not what the protocol promises.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& detail, const std::string& payload);
  const std::string& payload_excerpt() const noexcept { return excerpt_; }
  ExitCode exit_code() const noexcept override { return ExitCode::provider; }

 private:
  std::string excerpt_;
};

class IoError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::io; }
};

}  // namespace textaug
