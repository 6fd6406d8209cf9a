#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wsp {

enum class ErrorCode {
  NotPositiveDefinite,
  ConvergenceFailure,
  DimensionOverflow,
  DimensionMismatch,
  DegenerateColumn,
  DegenerateAxis,
  NonPositiveDiagonal,
  BadDimension,
  RhoOutOfRange,
  NotCorrelation,
  NuTooSmall,
  EmptyPath,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Numerical or contract failure raised by the core library.
///
/// `where()` names the failing operation as "module.operation" so front-ends
/// can report it without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string where, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& where() const noexcept { return where_; }

 private:
  ErrorCode code_;
  std::string where_;
};

}  // namespace wsp
