#pragma once

#include <string_view>

namespace diffcast::log {

enum class Level { Quiet = 0, Info = 1, Debug = 2 };

void set_level(Level level);
Level level();

void info(std::string_view message);
void debug(std::string_view message);
void warn(std::string_view message);

}  // namespace diffcast::log
