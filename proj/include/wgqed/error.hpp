// Error type shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace wgqed {

enum class ErrorCode {
    EmptyManifold,
    UnknownLevel,
    InvalidSystem,
    BasisMismatch,
    NonfiniteEntry,
    SingularMatrix,
    DivisionByZero,
    MultiGroundElastic,
    AsymmetricCoupling,
    StepTooLarge,
    OutOfRange,
    ParseError,
    SchemaError,
    ValidationError,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace wgqed
