#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tnt {

enum class ErrorKind {
  ShapeMismatch,
  EmptyTensor,
  NonFinite,
  LengthMismatch,
  DegenerateInput,
  DimensionTooLarge,
  ZeroTernary,
  InconsistentScalarSet,
  InvalidCode,
  InvalidConfig,
  ParseError,
  UnsupportedDtype,
  IoError,
  VersionMismatch,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure in the library is reported as an Error carrying its kind;
// callers that need to branch (the CLI exit codes) switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  // The message without the kind prefix, for re-raising with more context.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace tnt
