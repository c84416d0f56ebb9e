#pragma once

#include <string_view>

#include <fmt/format.h>

namespace dsea::log {

enum class Level { trace, debug, info, warn, error, off };

/// Reads DSEA_LOG (trace|debug|info|warn|error|off) once; defaults to warn.
void init_from_env();
void set_level(Level level);

void write(Level level, std::string_view message);

template <typename... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
    write(Level::info, fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void debug(fmt::format_string<Args...> f, Args&&... args) {
    write(Level::debug, fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void warn(fmt::format_string<Args...> f, Args&&... args) {
    write(Level::warn, fmt::format(f, std::forward<Args>(args)...));
}

} // namespace dsea::log
