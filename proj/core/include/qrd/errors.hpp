#pragma once

#include <stdexcept>
#include <string>

namespace qrd {

enum class ErrorKind {
    NotPSD,
    ZeroOperator,
    DimMismatch,
    BadAlpha,
    BadParams,
    SingularSigma,
    GenericityUndetermined,
    GenericityFails,
    NoConvexWitness,
    SupportViolation,
    KindNotWhitelisted,
    DimTooLarge,
    MalformedInput,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::ZeroOperator: return "ZeroOperator";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::BadAlpha: return "BadAlpha";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::SingularSigma: return "SingularSigma";
    case ErrorKind::GenericityUndetermined: return "GenericityUndetermined";
    case ErrorKind::GenericityFails: return "GenericityFails";
    case ErrorKind::NoConvexWitness: return "NoConvexWitness";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::KindNotWhitelisted: return "KindNotWhitelisted";
    case ErrorKind::DimTooLarge: return "DimTooLarge";
    case ErrorKind::MalformedInput: return "MalformedInput";
    }
    return "Unknown";
}

} // namespace qrd
