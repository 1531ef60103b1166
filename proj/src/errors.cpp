#include "simquant/errors.hpp"

namespace simquant {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::ZeroModulus: return "ZeroModulus";
        case ErrorKind::BadRange: return "BadRange";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::InterpolationOutOfRange: return "InterpolationOutOfRange";
        case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
        case ErrorKind::AliasingWarning: return "AliasingWarning";
        case ErrorKind::NotAdmissible: return "NotAdmissible";
        case ErrorKind::Divergent: return "Divergent";
        case ErrorKind::DistributionalWeight: return "DistributionalWeight";
        case ErrorKind::UnsupportedForDistributionalWeight: return "UnsupportedForDistributionalWeight";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::NotL1: return "NotL1";
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::AlphaTooSmall: return "AlphaTooSmall";
        case ErrorKind::ChoiceViolated: return "ChoiceViolated";
        case ErrorKind::RegularizationNotConverged: return "RegularizationNotConverged";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

}  // namespace simquant
