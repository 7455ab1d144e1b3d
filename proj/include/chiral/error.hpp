#pragma once

#include <stdexcept>
#include <string>

namespace chiral {

enum class ErrorKind {
    DivisionByZero,
    DenominatorVanishes,
    UnboundParameter,
    ConfigMismatch,
    OrientationMismatch,
    OrientationUnsupported,
    WindowTooSmall,
    InstanceMismatch,
    CollidingPoints,
    CollidingBlocks,
    TruncationIncompatible,
    NotLocalAtWindow,
    NotLocal,
    Parse,
    Overflow,
    Invalid,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace chiral
