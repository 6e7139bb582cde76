#include "glyset/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace glyset::log {

namespace {

Level parse_level(const char* s) {
    if (!s) return Level::Warn;
    std::string v(s);
    if (v == "debug") return Level::Debug;
    if (v == "info") return Level::Info;
    if (v == "warn") return Level::Warn;
    if (v == "error") return Level::Error;
    if (v == "off") return Level::Off;
    return Level::Warn;
}

const char* tag(Level l) {
    switch (l) {
        case Level::Debug: return "debug";
        case Level::Info: return "info";
        case Level::Warn: return "warning";
        case Level::Error: return "error";
        default: return "?";
    }
}

std::mutex g_mutex;
Sink g_sink;

} // namespace

Level threshold() {
    static Level level = parse_level(std::getenv("GLYSET_LOG"));
    return level;
}

void set_sink(Sink sink) {
    std::lock_guard<std::mutex> lock(g_mutex);
    g_sink = std::move(sink);
}

void emit(Level level, const std::string& message) {
    if (static_cast<int>(level) < static_cast<int>(threshold())) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    if (g_sink) {
        g_sink(level, message);
    } else {
        std::cerr << "glyset " << tag(level) << ": " << message << "\n";
    }
}

} // namespace glyset::log
