#include "bumpforge/errors.hpp"

namespace bumpforge {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::NotApplicable: return "NotApplicable";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::NotRegular: return "NotRegular";
        case ErrorCode::SingularJacobian: return "SingularJacobian";
        case ErrorCode::NotABump: return "NotABump";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::DivergenceDetected: return "DivergenceDetected";
        case ErrorCode::OddCrossings: return "OddCrossings";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::DataError: return "DataError";
    }
    return "Unknown";
}

}  // namespace bumpforge
