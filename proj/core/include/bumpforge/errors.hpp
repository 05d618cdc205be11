#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bumpforge {

enum class ErrorCode {
    InvalidParameter,
    NotApplicable,
    NoConvergence,
    NotRegular,
    SingularJacobian,
    NotABump,
    QuadratureFailure,
    SingularMatrix,
    DivergenceDetected,
    OddCrossings,
    ConfigError,
    DataError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code lets
/// callers (notably the CLI) map failures onto exit statuses.
class BumpError : public std::runtime_error {
public:
    BumpError(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw BumpError(code, what);
}

}  // namespace bumpforge
