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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "core/alerts.hpp"
#include "core/frame.hpp"
#include "core/uplink.hpp"

namespace sttk {

// Routing metadata that travels beside a LoRaWAN payload.
struct IngestMeta {
  std::string sensor_id;
  std::int64_t reception_ts = 0;  // Unix seconds at the network server
};

struct CollectorStats {
  std::size_t ingested = 0;    // points stored or changed
  std::size_t duplicates = 0;  // identical re-deliveries
  std::size_t decode_errors = 0;
  std::size_t invariant_violations = 0;
  std::size_t alerts_fired = 0;
  std::size_t alert_delivery_failures = 0;
};

struct IngestSummary {
  std::size_t lines = 0;
  std::size_t stored = 0;
  std::size_t rejected = 0;
};

// Cloud-side time series of crowding reports, one series per sensor.
//
// With a store directory, every accepted point is appended to
// <dir>/series/<sensor>.ndjson and the in-memory index is rebuilt from those
// files on construction; payloads that fail to decode are quarantined to
// <dir>/deadletter.ndjson.
//
// Safe for concurrent ingest and query. Writes to one sensor are serialized.
class Collector {
 public:
  explicit Collector(std::optional<std::filesystem::path> store_dir = std::nullopt);
  ~Collector();

  Collector(const Collector&) = delete;
  Collector& operator=(const Collector&) = delete;

  void add_policy(AlertPolicy policy, std::shared_ptr<AlertSink> sink);

  // Decodes, validates and stores one payload. Throws Error{DecodeError} or
  // Error{InvariantViolation}. A LoRaWAN point is stamped with
  // meta.reception_ts. Re-delivering an identical point changes nothing.
  SeriesPoint ingest(ByteView payload, Transport transport, const IngestMeta& meta = {});

  // One NDJSON line or MQTT message body: either a report JSON object or a
  // LoRaWAN envelope {"sensor_id":..,"port":10,"payload":"<hex>"
  // [,"received_at":<unix s>]}. Envelopes without received_at use
  // `reception_ts`.
  SeriesPoint ingest_text(std::string_view text, std::int64_t reception_ts);

  // Ingests every non-empty line; bad lines are counted, not fatal.
  IngestSummary ingest_ndjson(std::istream& in, const std::function<std::int64_t()>& clock);

  // Points with ts in [t0, t1], ascending. Throws Error{InvalidArgument} when
  // t0 > t1. Unknown sensors yield an empty series.
  std::vector<SeriesPoint> query(const std::string& sensor_id, std::int64_t t0,
                                 std::int64_t t1) const;

  std::vector<std::string> sensors() const;

  // Header sensor_id,ts,window_s,connected,probes_real,probes_virtual,total
  // then one RFC 4180 row per point.
  std::string export_csv(const std::string& sensor_id, std::int64_t t0, std::int64_t t1) const;
  // JSON array of report objects.
  std::string export_json(const std::string& sensor_id, std::int64_t t0, std::int64_t t1) const;

  CollectorStats stats() const;
  std::vector<Alert> fired_alerts() const;

 private:
  struct Series;
  struct PolicyBinding {
    AlertPolicy policy;
    std::shared_ptr<AlertSink> sink;
  };

  SeriesPoint store(SeriesPoint point);
  Series& series_for(const std::string& sensor_id);
  const Series* find_series(const std::string& sensor_id) const;
  void quarantine(ByteView payload, Transport transport, const std::string& reason);
  void load_existing();

  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::unique_ptr<Series>> series_;

  mutable std::mutex misc_mutex_;
  std::vector<PolicyBinding> policies_;
  std::vector<Alert> fired_;
  CollectorStats stats_;
  std::ofstream deadletter_;
};

// Sensor ids become file names: [A-Za-z0-9._-] pass through, anything else is
// written as %XX.
std::string encode_sensor_filename(std::string_view sensor_id);
std::optional<std::string> decode_sensor_filename(std::string_view name);

std::string csv_field(std::string_view field);

}  // namespace sttk
