#include "hiercode/error.hpp"

namespace hiercode {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedIds: return "MalformedIds";
        case ErrorCode::UnknownOperator: return "UnknownOperator";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::TreeTooDeep: return "TreeTooDeep";
        case ErrorCode::RadicalOverflow: return "RadicalOverflow";
        case ErrorCode::ParamsTooSmall: return "ParamsTooSmall";
        case ErrorCode::CapacityExceeded: return "CapacityExceeded";
        case ErrorCode::BadFormat: return "BadFormat";
        case ErrorCode::DuplicateRadical: return "DuplicateRadical";
        case ErrorCode::DuplicateCode: return "DuplicateCode";
        case ErrorCode::WrongLength: return "WrongLength";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::UnknownRadical: return "UnknownRadical";
        case ErrorCode::DuplicateCharacter: return "DuplicateCharacter";
        case ErrorCode::CodeCollision: return "CodeCollision";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::Corrupt: return "Corrupt";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::InfeasibleLabel: return "InfeasibleLabel";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::BadLabel: return "BadLabel";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace hiercode
