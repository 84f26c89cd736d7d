#include "relaxo/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace relaxo::log {

namespace {

Level parse_level() {
  const char* env = std::getenv("RELAXO_LOG");
  if (!env) return Level::Warn;
  if (std::strcmp(env, "debug") == 0) return Level::Debug;
  if (std::strcmp(env, "info") == 0) return Level::Info;
  if (std::strcmp(env, "warn") == 0) return Level::Warn;
  if (std::strcmp(env, "error") == 0) return Level::Error;
  if (std::strcmp(env, "off") == 0) return Level::Off;
  return Level::Warn;
}

const char* tag(Level lv) {
  switch (lv) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    default: return "?";
  }
}

} // namespace

Level level() {
  static const Level lv = parse_level();
  return lv;
}

bool enabled(Level lv) { return lv >= level() && level() != Level::Off; }

void write(Level lv, const std::string& msg) {
  if (!enabled(lv)) return;
  std::fprintf(stderr, "relaxo [%s] %s\n", tag(lv), msg.c_str());
}

} // namespace relaxo::log
