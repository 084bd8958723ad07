#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace jumpldp::logx {

enum class Level { kError = 0, kInfo = 1, kDebug = 2 };

// Level comes from JUMPLDP_LOG in {error, info, debug}; default error.
inline Level level() {
  static const Level lvl = [] {
    const char* env = std::getenv("JUMPLDP_LOG");
    if (!env) return Level::kError;
    const std::string v(env);
    if (v == "debug") return Level::kDebug;
    if (v == "info") return Level::kInfo;
    return Level::kError;
  }();
  return lvl;
}

inline void info(const std::string& msg) {
  if (level() >= Level::kInfo) std::cerr << "[info] " << msg << "\n";
}

inline void debug(const std::string& msg) {
  if (level() >= Level::kDebug) std::cerr << "[debug] " << msg << "\n";
}

inline void error(const std::string& msg) { std::cerr << "[error] " << msg << "\n"; }

}  // namespace jumpldp::logx
