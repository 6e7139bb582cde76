#pragma once

#include <functional>
#include <string>

namespace glyset::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

// Threshold comes from the GLYSET_LOG environment variable
// (debug|info|warn|error|off), read once. Default: warn.
Level threshold();

// Redirect messages (tests install a capturing sink). Pass nullptr to
// restore the default stderr sink.
using Sink = std::function<void(Level, const std::string&)>;
void set_sink(Sink sink);

void emit(Level level, const std::string& message);

inline void debug(const std::string& m) { emit(Level::Debug, m); }
inline void info(const std::string& m) { emit(Level::Info, m); }
inline void warn(const std::string& m) { emit(Level::Warn, m); }
inline void error(const std::string& m) { emit(Level::Error, m); }

} // namespace glyset::log
