#include "contagion/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string_view>

namespace contagion::log {

namespace {

Level parse_env() {
  const char* raw = std::getenv("CONTAGION_LOG");
  if (raw == nullptr) return Level::warn;
  std::string_view v(raw);
  if (v == "error") return Level::error;
  if (v == "warn") return Level::warn;
  if (v == "info") return Level::info;
  if (v == "debug") return Level::debug;
  return Level::warn;
}

const char* tag(Level level) {
  switch (level) {
    case Level::error: return "error";
    case Level::warn: return "warn";
    case Level::info: return "info";
    case Level::debug: return "debug";
  }
  return "?";
}

}  // namespace

Level threshold() {
  static const Level t = parse_env();
  return t;
}

void write(Level level, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(threshold())) return;
  std::cerr << "[contagion " << tag(level) << "] " << message << "\n";
}

}  // namespace contagion::log
