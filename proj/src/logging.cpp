/* Copyright (c) 2026 The strme Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include "strme/logging.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace strme {
namespace {

std::atomic<LogLevel> g_level{LogLevel::warning};
std::mutex g_mutex;

void emit(LogLevel level, const char* tag, std::string_view msg) {
  if (level < g_level.load()) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::clog << "[strme " << tag << "] " << msg << '\n';
}

}  // namespace

void set_log_level(LogLevel level) { g_level.store(level); }
LogLevel log_level() { return g_level.load(); }

void log_debug(std::string_view msg) { emit(LogLevel::debug, "debug", msg); }
void log_info(std::string_view msg) { emit(LogLevel::info, "info", msg); }
void log_warning(std::string_view msg) {
  emit(LogLevel::warning, "warning", msg);
}

}  // namespace strme
