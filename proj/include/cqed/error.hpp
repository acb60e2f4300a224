#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

enum class ErrorCode {
  InvalidArgument = 1,
  NotHermitian,
  DimensionOverflow,
  ConvergenceFailure,
  NumericalFailure,
  Config,
  Io,
};

// Every failure raised by the library carries one of the codes above so the
// C layer can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cqed
