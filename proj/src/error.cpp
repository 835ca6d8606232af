#include "tailfit/error.hpp"

namespace tailfit {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ThetaOutOfDomain: return "ThetaOutOfDomain";
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::NoTailData: return "NoTailData";
    case ErrorCode::ZeroModelVector: return "ZeroModelVector";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::Underidentified: return "Underidentified";
    case ErrorCode::SpatialNoData: return "SpatialNoData";
    case ErrorCode::NonPositiveZeta: return "NonPositiveZeta";
    case ErrorCode::BisectionFailure: return "BisectionFailure";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace tailfit
