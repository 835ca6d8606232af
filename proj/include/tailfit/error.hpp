#pragma once

#include <stdexcept>
#include <string>

namespace tailfit {

enum class ErrorCode {
  InvalidArgument,
  ThetaOutOfDomain,
  ParamOutOfRange,
  NonFiniteInput,
  ZeroDenominator,
  Unreachable,
  NoTailData,
  ZeroModelVector,
  SingularJacobian,
  UnsupportedFamily,
  Underidentified,
  SpatialNoData,
  NonPositiveZeta,
  BisectionFailure,
  CholeskyFailure,
  Io,
  Parse,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace tailfit
