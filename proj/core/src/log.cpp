#include "ocrhmm/log.hpp"

#include <iostream>
#include <mutex>

namespace ocrhmm::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& active_sink() {
  static Sink sink = [](Level level, std::string_view message) {
    if (level < Level::warning) return;
    std::cerr << (level == Level::error ? "error: " : "warning: ") << message << '\n';
  };
  return sink;
}

Level& threshold() {
  static Level level = Level::info;
  return level;
}

}  // namespace

Sink set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  Sink previous = std::move(active_sink());
  active_sink() = std::move(sink);
  return previous;
}

void set_level(Level level) {
  std::lock_guard lock(sink_mutex());
  threshold() = level;
}

void write(Level level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (level < threshold() || !active_sink()) return;
  active_sink()(level, message);
}

}  // namespace ocrhmm::log
