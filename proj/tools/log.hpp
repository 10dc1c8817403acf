#pragma once

#include <cstdlib>
#include <ostream>
#include <string_view>

namespace quasiode::cli {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Level from QUASIODE_LOG (error, info, debug); error when unset or unrecognized.
inline LogLevel log_level() {
    const char* v = std::getenv("QUASIODE_LOG");
    if (!v) return LogLevel::Error;
    const std::string_view s(v);
    if (s == "debug") return LogLevel::Debug;
    if (s == "info") return LogLevel::Info;
    return LogLevel::Error;
}

inline void log(std::ostream& err, LogLevel level, std::string_view msg) {
    if (static_cast<int>(level) > static_cast<int>(log_level())) return;
    err << (level == LogLevel::Debug ? "[debug] " : "[info] ") << msg << '\n';
}

}  // namespace quasiode::cli
