#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cartan {

enum class ErrorCode {
  DivisionByZero,
  UnboundSymbol,
  PoleAtPoint,
  Unsupported,
  ParseError,
  NotMonic,
  BasisMismatch,
  NeedsCoordinateBasis,
  SingularSystem,
  SingularGroup,
  PlanMismatch,
  IncompleteReduction,
  SamplingFailure,
  NumericFailure,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code so the
/// CLI can map it onto an error record and a nonzero exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cartan
