// Copyright 2026 The sttk Authors
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

#pragma once

#include <chrono>
#include <cstdint>

namespace sttk {

using Duration = std::chrono::microseconds;
using Timestamp = std::chrono::sys_time<Duration>;

inline constexpr Timestamp timestamp_from_seconds(std::int64_t seconds,
                                                  std::int64_t micros = 0) {
  return Timestamp{Duration{seconds * 1'000'000 + micros}};
}

inline constexpr std::int64_t micros_since_epoch(Timestamp ts) {
  return ts.time_since_epoch().count();
}

// Whole Unix seconds, rounded toward negative infinity.
inline constexpr std::int64_t unix_seconds(Timestamp ts) {
  return std::chrono::floor<std::chrono::seconds>(ts).time_since_epoch().count();
}

inline constexpr Duration seconds(std::int64_t s) { return Duration{s * 1'000'000}; }

}  // namespace sttk
