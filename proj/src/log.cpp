#include "ministra/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace ministra::log {
namespace {

Level level_from_env() {
  const char* env = std::getenv("MINISTRA_LOG");
  if (env == nullptr) return Level::info;
  if (std::strcmp(env, "quiet") == 0) return Level::quiet;
  if (std::strcmp(env, "debug") == 0) return Level::debug;
  return Level::info;
}

std::atomic<int>& level_storage() {
  static std::atomic<int> lvl{static_cast<int>(level_from_env())};
  return lvl;
}

std::atomic<std::size_t> g_warnings{0};
std::mutex g_mutex;

void emit(const char* prefix, std::string_view msg) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::fprintf(stderr, "%s%.*s\n", prefix, static_cast<int>(msg.size()), msg.data());
}

}  // namespace

Level level() { return static_cast<Level>(level_storage().load(std::memory_order_relaxed)); }

void set_level(Level lvl) { level_storage().store(static_cast<int>(lvl)); }

void write_warning(std::string_view msg) {
  g_warnings.fetch_add(1, std::memory_order_relaxed);
  if (level() >= Level::info) emit("WARN ", msg);
}

void write_info(std::string_view msg) { emit("INFO ", msg); }
void write_debug(std::string_view msg) { emit("DEBUG ", msg); }

std::size_t warning_count() { return g_warnings.load(); }

}  // namespace ministra::log
