#include "llmslice/errors.hpp"

namespace llmslice {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::PastTime: return "PastTime";
        case ErrorCode::InvalidCqi: return "InvalidCqi";
        case ErrorCode::InvalidQuota: return "InvalidQuota";
        case ErrorCode::InvalidTransition: return "InvalidTransition";
        case ErrorCode::DuplicateSlice: return "DuplicateSlice";
        case ErrorCode::AdmissionRejected: return "AdmissionRejected";
        case ErrorCode::DuplicateRecord: return "DuplicateRecord";
        case ErrorCode::InfeasibleBounds: return "InfeasibleBounds";
        case ErrorCode::ModeMismatch: return "ModeMismatch";
        case ErrorCode::EmptyRun: return "EmptyRun";
        case ErrorCode::DivisionByZeroMetric: return "DivisionByZeroMetric";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::MissingKey: return "MissingKey";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::CrossRefError: return "CrossRefError";
    }
    return "UnknownError";
}

bool is_config_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::MissingKey:
        case ErrorCode::UnknownKey:
        case ErrorCode::CrossRefError:
        case ErrorCode::DuplicateRecord:
        case ErrorCode::DuplicateSlice:
        case ErrorCode::AdmissionRejected:
        case ErrorCode::InfeasibleBounds:
            return true;
        default:
            return false;
    }
}

}  // namespace llmslice
