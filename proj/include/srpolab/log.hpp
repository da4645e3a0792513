// Copyright 2026 The SRPO Lab Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal stderr logger. The threshold comes from SRPO_LAB_LOG
// (error | info | debug, default error).

#ifndef SRPOLAB_LOG_HPP_
#define SRPOLAB_LOG_HPP_

#include <string_view>

namespace srpo {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

LogLevel CurrentLogLevel();
void SetLogLevel(LogLevel level);
void Log(LogLevel level, std::string_view message);

inline void LogError(std::string_view m) { Log(LogLevel::kError, m); }
inline void LogInfo(std::string_view m) { Log(LogLevel::kInfo, m); }
inline void LogDebug(std::string_view m) { Log(LogLevel::kDebug, m); }

}  // namespace srpo

#endif  // SRPOLAB_LOG_HPP_
