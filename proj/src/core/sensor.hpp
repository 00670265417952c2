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
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "core/config.hpp"
#include "core/counter.hpp"
#include "core/detector.hpp"
#include "core/oui_registry.hpp"
#include "core/pcap.hpp"
#include "core/uplink.hpp"
#include "core/window_store.hpp"

namespace sttk {

struct SensorStats {
  std::size_t frames = 0;
  std::size_t malformed_frames = 0;
  std::size_t observations = 0;
  std::array<std::size_t, kIdentityKindCount> observations_by_kind{};
  std::size_t reports = 0;
  std::size_t reports_delivered = 0;
  std::size_t reports_dropped = 0;
};

struct SensorSettings {
  std::string sensor_id = "sensor-1";
  Duration window = seconds(300);
  Duration sample_period = seconds(300);
  FingerprintConfig fingerprint;
  Salt salt;
  Transport transport = Transport::JsonMqtt;
  std::size_t queue_capacity = Publisher::kDefaultCapacity;
  std::filesystem::path journal;  // empty: in-memory only

  // Throws Error{InvalidConfig} when the config has no salt.
  static SensorSettings from_config(const SensorConfig& config);
};

// The edge pipeline: frames go through the detector into the window store;
// every sample period a report is counted and published.
//
// Ticks fall on multiples of the sample period since the Unix epoch, driven by
// capture timestamps. A frame stamped exactly on a tick belongs to that tick.
// After the last frame one more report is emitted at the next tick, so the
// final report covers the tail of the capture. A capture with no frames yields
// a single all-zero report at ts 0.
class Sensor {
 public:
  Sensor(SensorSettings settings, const OuiRegistry& registry, Sink& sink);

  void ingest(const CaptureRecord& record);
  // Emits the closing report. Further ingest() calls are not allowed.
  void finish();

  // Feeds every record of the source, then finish(). Throws the source's
  // error, if any, after the records read before it were processed.
  void run(CaptureSource& source);

  const std::vector<CrowdingReport>& reports() const { return reports_; }
  const SensorStats& stats() const { return stats_; }
  const WindowStore& store() const { return *store_; }
  const SensorSettings& settings() const { return settings_; }

 private:
  void tick(Timestamp now);

  SensorSettings settings_;
  Detector detector_;
  std::unique_ptr<WindowStore> store_;
  Publisher publisher_;
  std::optional<Timestamp> next_tick_;
  bool finished_ = false;
  std::vector<CrowdingReport> reports_;
  SensorStats stats_;
};

// Builds the configured sink: stdout (written to `out`), an NDJSON file, or
// an MQTT publisher.
std::unique_ptr<Sink> make_sink(const SensorConfig& config, std::ostream& out);

// The configured registry path, or the bundled snapshot when none is set.
std::filesystem::path registry_path(const SensorConfig& config);

}  // namespace sttk
