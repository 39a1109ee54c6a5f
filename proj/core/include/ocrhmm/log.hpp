#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace ocrhmm::log {

enum class Level { debug, info, warning, error };

using Sink = std::function<void(Level, std::string_view)>;

/// Replaces the active sink and returns the previous one. The default sink
/// prints warnings and errors to stderr.
Sink set_sink(Sink sink);

/// Messages below this level are dropped before reaching the sink.
void set_level(Level level);

void write(Level level, std::string_view message);

inline void debug(std::string_view m) { write(Level::debug, m); }
inline void info(std::string_view m) { write(Level::info, m); }
inline void warn(std::string_view m) { write(Level::warning, m); }
inline void error(std::string_view m) { write(Level::error, m); }

}  // namespace ocrhmm::log
