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

#include <cstdint>
#include <string>

namespace sttk {

// One sampling tick's crowding measurement.
//   total == connected + probes_real + probes_virtual
struct CrowdingReport {
  std::string sensor_id;
  std::int64_t ts = 0;  // Unix seconds, UTC
  std::uint32_t window_s = 0;
  std::uint64_t connected = 0;
  std::uint64_t probes_real = 0;
  std::uint64_t probes_virtual = 0;
  std::uint64_t total = 0;

  bool consistent() const { return total == connected + probes_real + probes_virtual; }

  friend bool operator==(const CrowdingReport&, const CrowdingReport&) = default;
};

}  // namespace sttk
