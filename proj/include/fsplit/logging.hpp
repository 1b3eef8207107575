#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace fsplit::logging {

enum class Level { kError = 0, kInfo = 1, kDebug = 2 };

// Threshold comes from FS_LOG in {error, info, debug}; default error.
inline Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("FS_LOG");
    if (env == nullptr) return Level::kError;
    if (std::strcmp(env, "debug") == 0) return Level::kDebug;
    if (std::strcmp(env, "info") == 0) return Level::kInfo;
    return Level::kError;
  }();
  return level;
}

inline void write(Level level, const std::string& msg) {
  if (level > threshold()) return;
  const char* tag = level == Level::kError   ? "error"
                    : level == Level::kInfo  ? "info"
                                             : "debug";
  std::fprintf(stderr, "[fsplit:%s] %s\n", tag, msg.c_str());
}

inline void error(const std::string& msg) { write(Level::kError, msg); }
inline void info(const std::string& msg) { write(Level::kInfo, msg); }
inline void debug(const std::string& msg) { write(Level::kDebug, msg); }

}  // namespace fsplit::logging
