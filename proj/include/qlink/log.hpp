#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace qlink::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

// Level comes from the QLINK_LOG environment variable; default "warn".
inline Level level() {
  static Level lv = [] {
    const char* env = std::getenv("QLINK_LOG");
    std::string s = env ? env : "warn";
    if (s == "debug") return Level::Debug;
    if (s == "info") return Level::Info;
    if (s == "warn") return Level::Warn;
    if (s == "error") return Level::Error;
    if (s == "off") return Level::Off;
    return Level::Warn;
  }();
  return lv;
}

inline void emit(Level lv, const std::string& tag, const std::string& msg) {
  if (lv < level()) return;
  std::cerr << "[qlink " << tag << "] " << msg << "\n";
}

inline void debug(const std::string& msg) { emit(Level::Debug, "debug", msg); }
inline void info(const std::string& msg) { emit(Level::Info, "info", msg); }
inline void warn(const std::string& msg) { emit(Level::Warn, "warn", msg); }
inline void error(const std::string& msg) { emit(Level::Error, "error", msg); }

}  // namespace qlink::log
