#include "fedsched/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace fedsched {

LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("FEDSCHED_LOG");
        if (env == nullptr) return LogLevel::error;
        if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
        if (std::strcmp(env, "info") == 0) return LogLevel::info;
        return LogLevel::error;
    }();
    return level;
}

void log_msg(LogLevel level, const std::string& msg) {
    if (level > log_level()) return;
    const char* tag = level == LogLevel::error ? "error" : level == LogLevel::info ? "info" : "debug";
    std::fprintf(stderr, "[fedsched:%s] %s\n", tag, msg.c_str());
}

} // namespace fedsched
