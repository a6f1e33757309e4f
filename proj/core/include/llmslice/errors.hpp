#pragma once
#include <stdexcept>
#include <string>

namespace llmslice {

enum class ErrorCode {
    // engine
    PastTime,
    // radio
    InvalidCqi,
    // mac
    InvalidQuota,
    // slicectl
    InvalidTransition,
    DuplicateSlice,
    AdmissionRejected,
    DuplicateRecord,
    // ric
    InfeasibleBounds,
    ModeMismatch,
    // metrics
    EmptyRun,
    DivisionByZeroMetric,
    IoError,
    // scenario / cli
    ParseError,
    MissingKey,
    UnknownKey,
    CrossRefError,
};

const char* error_code_name(ErrorCode code);

// True for errors that mean "the configuration is invalid" as opposed to a
// failure while running; the CLI maps these to exit code 2.
bool is_config_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace llmslice
