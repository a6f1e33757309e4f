#include "llmslice/log.hpp"

#include <cstdlib>
#include <iostream>

namespace llmslice {

namespace {

LogLevel level_from_env() {
    const char* env = std::getenv("LLMSLICE_LOG");
    if (env == nullptr) return LogLevel::Off;
    std::string value(env);
    if (value == "debug") return LogLevel::Debug;
    if (value == "info") return LogLevel::Info;
    return LogLevel::Off;
}

LogLevel& level_ref() {
    static LogLevel level = level_from_env();
    return level;
}

}  // namespace

LogLevel log_level() { return level_ref(); }

void set_log_level(LogLevel level) { level_ref() = level; }

void log_info(const std::string& message) {
    if (log_level() >= LogLevel::Info) std::cerr << "[llmslice] " << message << "\n";
}

void log_debug(const std::string& message) {
    if (log_level() >= LogLevel::Debug) std::cerr << "[llmslice] " << message << "\n";
}

}  // namespace llmslice
