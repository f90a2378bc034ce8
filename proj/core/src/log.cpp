#include "diffcast/log.hpp"

#include <atomic>
#include <iostream>

namespace diffcast::log {

namespace {
std::atomic<Level> g_level{Level::Quiet};
}

void set_level(Level l) { g_level.store(l); }
Level level() { return g_level.load(); }

void info(std::string_view message) {
    if (g_level.load() >= Level::Info) std::clog << "[diffcast] " << message << '\n';
}

void debug(std::string_view message) {
    if (g_level.load() >= Level::Debug) std::clog << "[diffcast:debug] " << message << '\n';
}

void warn(std::string_view message) { std::clog << "[diffcast:warning] " << message << '\n'; }

}  // namespace diffcast::log
