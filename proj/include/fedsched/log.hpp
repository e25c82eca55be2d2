#pragma once

#include <string>

namespace fedsched {

enum class LogLevel { error = 0, info = 1, debug = 2 };

/// Level read once from FEDSCHED_LOG (error|info|debug); default error.
LogLevel log_level();

void log_msg(LogLevel level, const std::string& msg);

inline void log_error(const std::string& msg) { log_msg(LogLevel::error, msg); }
inline void log_info(const std::string& msg) { log_msg(LogLevel::info, msg); }
inline void log_debug(const std::string& msg) { log_msg(LogLevel::debug, msg); }

} // namespace fedsched
