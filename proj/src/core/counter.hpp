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

#include <string>

#include "core/report.hpp"
#include "core/time.hpp"
#include "core/window_store.hpp"

namespace sttk {

// Sums the three identity classes of a window. A real-MAC probe whose
// anonymized id also appears among connected stations is counted once, as a
// connected station. Footprints are never merged with MAC-based ids.
CrowdingReport count_window(const WindowSnapshot& snapshot, const std::string& sensor_id,
                            Timestamp now, Duration window);

}  // namespace sttk
