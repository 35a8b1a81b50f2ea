/*
 * Copyright 2026 The bbastar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace bba {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Reads BBA_LOG once (error, info, or debug; default info). Unknown values
/// fall back to info.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("BBA_LOG");
    if (!env) return LogLevel::Info;
    std::string v(env);
    if (v == "error") return LogLevel::Error;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

/// Progress and diagnostics go to stderr so stdout stays machine-readable.
inline void log_line(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  const char* tag = level == LogLevel::Error  ? "error"
                    : level == LogLevel::Info ? "info"
                                              : "debug";
  std::cerr << "[" << tag << "] " << message << "\n";
}

}  // namespace bba
