#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lse {

enum class ErrorKind {
  InvalidInput,
  DegenerateSystem,
  StepTooLarge,
  DegeneratePath,
  SingleLevelMode,
  EnergyFold,
  NoPeak,
  TruncatedLine,
  OutOfRange,
  PreconditionViolation,
  InvalidStart,
  Diverged,
  MissingKey,
  UnknownKey,
  UnitMismatch,
  ParseError,
  DuplicateAbscissa,
  EmptyFile,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorClass { Input, Numerical };
ErrorClass classify(ErrorKind kind);

class LseError : public std::runtime_error {
 public:
  LseError(ErrorKind kind, std::string detail);

  ErrorKind kind() const noexcept { return kind_; }
  /// The offending field, key, line or value, without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, std::string detail);

}  // namespace lse
