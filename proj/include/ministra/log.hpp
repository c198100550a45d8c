#pragma once

#include <fmt/format.h>

#include <atomic>
#include <string_view>

namespace ministra::log {

enum class Level { quiet = 0, info = 1, debug = 2 };

/// Current verbosity. Initialized once from MINISTRA_LOG (quiet|info|debug, default info).
Level level();
void set_level(Level lvl);

/// Warnings are always counted, printed unless quiet.
void write_warning(std::string_view msg);
void write_info(std::string_view msg);
void write_debug(std::string_view msg);

std::size_t warning_count();

template <typename... Args>
void warn(fmt::format_string<Args...> f, Args&&... args) {
  write_warning(fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
  if (level() >= Level::info) write_info(fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void debug(fmt::format_string<Args...> f, Args&&... args) {
  if (level() >= Level::debug) write_debug(fmt::format(f, std::forward<Args>(args)...));
}

}  // namespace ministra::log
