#pragma once
#include <string>

namespace llmslice {

enum class LogLevel { Off = 0, Info = 1, Debug = 2 };

// Diagnostics go to stderr only; results are written to files/stdout.
// Level comes from the LLMSLICE_LOG env var (off|info|debug), default off.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace llmslice
