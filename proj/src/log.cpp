#include "mot/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace mot::log {

namespace {

std::atomic<Level> g_level{Level::kInfo};
std::mutex g_mutex;

void emit(Level lvl, const char* tag, std::string_view message) {
  if (lvl < g_level.load()) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << '[' << tag << "] " << message << '\n';
}

}  // namespace

void set_level(Level lvl) { g_level.store(lvl); }
Level level() { return g_level.load(); }

void debug(std::string_view message) { emit(Level::kDebug, "debug", message); }
void info(std::string_view message) { emit(Level::kInfo, "info", message); }
void warn(std::string_view message) { emit(Level::kWarn, "warn", message); }
void error(std::string_view message) { emit(Level::kError, "error", message); }

}  // namespace mot::log
