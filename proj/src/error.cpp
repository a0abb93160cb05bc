#include "wgqed/error.hpp"

namespace wgqed {

const char* error_code_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::EmptyManifold: return "EmptyManifold";
    case ErrorCode::UnknownLevel: return "UnknownLevel";
    case ErrorCode::InvalidSystem: return "InvalidSystem";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::NonfiniteEntry: return "NonfiniteEntry";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::MultiGroundElastic: return "MultiGroundElastic";
    case ErrorCode::AsymmetricCoupling: return "AsymmetricCoupling";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace wgqed
