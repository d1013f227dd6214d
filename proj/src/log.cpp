// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace lp::log {
namespace {

std::atomic<Level> g_level{Level::info};
std::mutex g_mutex;

const char* tag(Level level) {
  switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    case Level::off: break;
  }
  return "";
}

}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void write(Level level, std::string_view message) {
  if (level < g_level.load() || level == Level::off) return;
  std::lock_guard lock(g_mutex);
  std::clog << "[lp " << tag(level) << "] " << message << '\n';
}

}  // namespace lp::log
