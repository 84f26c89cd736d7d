#pragma once

// Minimal stderr logger. Level comes from the RELAXO_LOG environment
// variable: debug | info | warn | error | off (default warn).

#include <string>

namespace relaxo::log {

enum class Level { Debug = 0, Info, Warn, Error, Off };

Level level();
bool enabled(Level lv);
void write(Level lv, const std::string& msg);

inline void debug(const std::string& msg) { write(Level::Debug, msg); }
inline void info(const std::string& msg) { write(Level::Info, msg); }
inline void warn(const std::string& msg) { write(Level::Warn, msg); }
inline void error(const std::string& msg) { write(Level::Error, msg); }

} // namespace relaxo::log
