#include "dsea/common/log.hpp"

#include <cstdlib>
#include <mutex>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace dsea::log {

namespace {

std::shared_ptr<spdlog::logger> logger() {
    static std::once_flag once;
    static std::shared_ptr<spdlog::logger> instance;
    std::call_once(once, [] {
        instance = spdlog::stderr_color_mt("dsea");
        instance->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
        instance->set_level(spdlog::level::warn);
    });
    return instance;
}

spdlog::level::level_enum to_spd(Level level) {
    switch (level) {
    case Level::trace: return spdlog::level::trace;
    case Level::debug: return spdlog::level::debug;
    case Level::info: return spdlog::level::info;
    case Level::warn: return spdlog::level::warn;
    case Level::error: return spdlog::level::err;
    case Level::off: return spdlog::level::off;
    }
    return spdlog::level::warn;
}

} // namespace

void init_from_env() {
    const char* env = std::getenv("DSEA_LOG");
    if (env == nullptr) return;
    const std::string v(env);
    if (v == "trace") set_level(Level::trace);
    else if (v == "debug") set_level(Level::debug);
    else if (v == "info") set_level(Level::info);
    else if (v == "warn") set_level(Level::warn);
    else if (v == "error") set_level(Level::error);
    else if (v == "off") set_level(Level::off);
}

void set_level(Level level) { logger()->set_level(to_spd(level)); }

void write(Level level, std::string_view message) { logger()->log(to_spd(level), "{}", message); }

} // namespace dsea::log
