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

#include "core/counter.hpp"

#include <chrono>

namespace sttk {

CrowdingReport count_window(const WindowSnapshot& snapshot, const std::string& sensor_id,
                            Timestamp now, Duration window) {
  const auto& connected = snapshot.of(IdentityKind::ConnectedUe);
  const auto& real = snapshot.of(IdentityKind::RealProbeMobile);

  std::uint64_t real_only = 0;
  for (auto id : real) {
    if (!connected.contains(id)) ++real_only;
  }

  CrowdingReport r;
  r.sensor_id = sensor_id;
  r.ts = unix_seconds(now);
  r.window_s = static_cast<std::uint32_t>(
      std::chrono::duration_cast<std::chrono::seconds>(window).count());
  r.connected = connected.size();
  r.probes_real = real_only;
  r.probes_virtual = snapshot.of(IdentityKind::VirtualFootprint).size();
  r.total = r.connected + r.probes_real + r.probes_virtual;
  return r;
}

}  // namespace sttk
