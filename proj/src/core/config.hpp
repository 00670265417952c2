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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/alerts.hpp"
#include "core/detector.hpp"
#include "core/uplink.hpp"

namespace sttk {

struct SinkSettings {
  std::string type = "stdout";  // stdout | file | mqtt
  std::string path;             // file
  std::string host = "127.0.0.1";
  std::uint16_t port = 1883;
  std::string client_id;  // mqtt; defaults to "sttk-<sensor_id>"
};

struct SourceSettings {
  std::string type = "file";  // file | stdin | mqtt
  std::string path;
  std::string host = "127.0.0.1";
  std::uint16_t port = 1883;
  std::string topic = "sttk/v1/+/crowding";
};

struct CollectorSettings {
  std::string store_dir;
  std::vector<SourceSettings> sources;
  std::vector<AlertPolicy> alerts;
};

// One JSON file configures a sensor and, optionally, a collector:
//
//   {"sensor_id": "hall-a", "window_s": 300, "sample_period_s": 300,
//    "salt": "<16 hex digits>", "transport": "json_mqtt",
//    "sink": {"type": "file", "path": "reports.ndjson"},
//    "fingerprint": {"included_ie_ids": [...], "varying_ie_ids": [3]},
//    "oui_registry": "oui_registry.tsv", "journal": "observations.ndjson",
//    "collector": {"store_dir": "store", "sources": [...], "alerts": [...]}}
//
// Relative paths are resolved against the directory holding the file.
struct SensorConfig {
  std::string sensor_id = "sensor-1";
  std::int64_t window_s = 300;
  std::int64_t sample_period_s = 300;
  std::optional<Salt> salt;
  Transport transport = Transport::JsonMqtt;
  SinkSettings sink;
  std::optional<std::vector<std::uint8_t>> included_ie_ids;
  std::optional<std::vector<std::uint8_t>> varying_ie_ids;
  std::string oui_registry;
  std::string journal;
  std::size_t queue_capacity = Publisher::kDefaultCapacity;
  CollectorSettings collector;
  std::filesystem::path base_dir;

  FingerprintConfig fingerprint() const;
  // Empty stays empty; relative paths are taken from base_dir.
  std::filesystem::path resolve(const std::string& path) const;
};

// Throws Error{InvalidConfig}.
SensorConfig parse_config(std::string_view json, const std::filesystem::path& base_dir = {});
std::string config_json(const SensorConfig& config);

SensorConfig load_config(const std::filesystem::path& path);
void save_config(const SensorConfig& config, const std::filesystem::path& path);

// Loads the file and, when it has no salt yet, generates one and adds it to
// the file so later runs reuse it.
SensorConfig load_config_with_salt(const std::filesystem::path& path);

Salt generate_salt();

// The explicit path if non-empty, else $STTK_CONFIG, else nullopt.
std::optional<std::filesystem::path> resolve_config_path(std::string_view explicit_path);

}  // namespace sttk
