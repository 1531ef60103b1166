#pragma once

#include <stdexcept>
#include <string>

namespace simquant {

enum class ErrorKind {
    ZeroModulus,
    BadRange,
    DomainError,
    InterpolationOutOfRange,
    QuadratureNotConverged,
    AliasingWarning,
    NotAdmissible,
    Divergent,
    DistributionalWeight,
    UnsupportedForDistributionalWeight,
    GridMismatch,
    NotL1,
    NotHermitian,
    AlphaTooSmall,
    ChoiceViolated,
    RegularizationNotConverged,
    ParseError,
    ValidationError,
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

}  // namespace simquant
