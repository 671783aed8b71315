#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hiercode {

enum class ErrorCode {
    MalformedIds,
    UnknownOperator,
    InvalidParams,
    TreeTooDeep,
    RadicalOverflow,
    ParamsTooSmall,
    CapacityExceeded,
    BadFormat,
    DuplicateRadical,
    DuplicateCode,
    WrongLength,
    ZeroVector,
    UnknownRadical,
    DuplicateCharacter,
    CodeCollision,
    VersionMismatch,
    Corrupt,
    DimensionMismatch,
    NonFinite,
    InfeasibleLabel,
    TooLarge,
    BadLabel,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every library failure is reported as an Error carrying a machine-readable
/// code; what() is "<CodeName>: <detail>".
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

    /// I/O problems map to exit status 2, everything else is a domain error.
    bool is_io() const noexcept { return code_ == ErrorCode::Io; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace hiercode
