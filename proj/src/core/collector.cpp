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

#include "core/collector.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "core/error.hpp"
#include "core/hex.hpp"

namespace sttk {

struct Collector::Series {
  mutable std::mutex mutex;
  std::map<std::int64_t, SeriesPoint> points;
  std::ofstream file;
};

namespace {

constexpr std::string_view kCsvHeader =
    "sensor_id,ts,window_s,connected,probes_real,probes_virtual,total";

bool filename_safe(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
         c == '_' || c == '-';
}

ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Components saturate independently, so only an unsaturated breakdown pins
// the total exactly.
bool lorawan_consistent(const LoraFields& f) {
  constexpr std::uint32_t kMax = 0xFFFF;
  if (f.connected == kMax || f.probes_real == kMax || f.probes_virtual == kMax) {
    return f.total == kMax;
  }
  const std::uint32_t sum = std::uint32_t{f.connected} + f.probes_real + f.probes_virtual;
  return f.total == std::min(sum, kMax);
}

}  // namespace

std::string encode_sensor_filename(std::string_view sensor_id) {
  std::string out;
  char buf[4];
  for (char c : sensor_id) {
    if (filename_safe(c)) {
      out.push_back(c);
    } else {
      std::snprintf(buf, sizeof buf, "%%%02X", static_cast<unsigned char>(c));
      out += buf;
    }
  }
  return out;
}

std::optional<std::string> decode_sensor_filename(std::string_view name) {
  std::string out;
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (name[i] != '%') {
      out.push_back(name[i]);
      continue;
    }
    if (i + 2 >= name.size()) return std::nullopt;
    const auto b = from_hex(name.substr(i + 1, 2));
    if (!b) return std::nullopt;
    out.push_back(static_cast<char>((*b)[0]));
    i += 2;
  }
  return out;
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Collector::Collector(std::optional<std::filesystem::path> store_dir) : dir_(std::move(store_dir)) {
  if (!dir_) return;
  std::error_code ec;
  std::filesystem::create_directories(*dir_ / "series", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create store " + dir_->string() + ": " + ec.message());
  load_existing();
  deadletter_.open(*dir_ / "deadletter.ndjson", std::ios::app);
  if (!deadletter_) throw Error(ErrorCode::Io, "cannot open dead-letter file in " + dir_->string());
}

Collector::~Collector() = default;

void Collector::load_existing() {
  for (const auto& entry : std::filesystem::directory_iterator(*dir_ / "series")) {
    if (!entry.is_regular_file() || entry.path().extension() != ".ndjson") continue;
    const auto sensor = decode_sensor_filename(entry.path().stem().string());
    if (!sensor) continue;
    auto s = std::make_unique<Series>();
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        SeriesPoint p = decode_json(line);
        if (p.sensor_id != *sensor) continue;
        s->points[p.ts] = std::move(p);
      } catch (const Error&) {
        // torn tail line from an interrupted write
      }
    }
    s->file.open(entry.path(), std::ios::app);
    series_.emplace(*sensor, std::move(s));
  }
}

void Collector::add_policy(AlertPolicy policy, std::shared_ptr<AlertSink> sink) {
  if (policy.consecutive == 0) {
    throw Error(ErrorCode::InvalidConfig, "alert policy '" + policy.name + "' needs consecutive >= 1");
  }
  std::lock_guard lock(misc_mutex_);
  policies_.push_back({std::move(policy), std::move(sink)});
}

Collector::Series& Collector::series_for(const std::string& sensor_id) {
  {
    std::shared_lock lock(map_mutex_);
    const auto it = series_.find(sensor_id);
    if (it != series_.end()) return *it->second;
  }
  std::unique_lock lock(map_mutex_);
  auto& slot = series_[sensor_id];
  if (!slot) {
    slot = std::make_unique<Series>();
    if (dir_) {
      const auto path = *dir_ / "series" / (encode_sensor_filename(sensor_id) + ".ndjson");
      slot->file.open(path, std::ios::app);
      if (!slot->file) throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
  }
  return *slot;
}

const Collector::Series* Collector::find_series(const std::string& sensor_id) const {
  std::shared_lock lock(map_mutex_);
  const auto it = series_.find(sensor_id);
  return it == series_.end() ? nullptr : it->second.get();
}

void Collector::quarantine(ByteView payload, Transport transport, const std::string& reason) {
  std::lock_guard lock(misc_mutex_);
  ++stats_.decode_errors;
  if (!deadletter_.is_open()) return;
  nlohmann::ordered_json j;
  j["transport"] = to_string(transport);
  j["reason"] = reason;
  j["payload_hex"] = to_hex(payload);
  deadletter_ << j.dump() << '\n';
  deadletter_.flush();
}

SeriesPoint Collector::store(SeriesPoint point) {
  std::vector<PolicyBinding> policies;
  {
    std::lock_guard lock(misc_mutex_);
    policies = policies_;
  }
  std::uint32_t max_k = 1;
  for (const auto& b : policies) max_k = std::max(max_k, b.policy.consecutive);

  std::vector<std::pair<Alert, std::shared_ptr<AlertSink>>> to_send;
  Series& s = series_for(point.sensor_id);
  {
    std::lock_guard lock(s.mutex);
    const auto it = s.points.find(point.ts);
    if (it != s.points.end() && it->second == point) {
      std::lock_guard stats_lock(misc_mutex_);
      ++stats_.duplicates;
      return point;
    }
    s.points[point.ts] = point;
    if (s.file.is_open()) {
      s.file << encode_json(point) << '\n';
      s.file.flush();
    }

    if (!policies.empty()) {
      // The last max_k samples before this one, oldest first.
      std::vector<SeriesPoint> history;
      auto pos = s.points.find(point.ts);
      while (pos != s.points.begin() && history.size() < max_k) {
        --pos;
        history.push_back(pos->second);
      }
      std::reverse(history.begin(), history.end());
      for (const auto& b : policies) {
        if (!b.policy.applies_to(point.sensor_id)) continue;
        if (auto alert = evaluate_alerts(b.policy, point, history)) {
          to_send.emplace_back(std::move(*alert), b.sink);
        }
      }
    }
  }

  std::size_t failures = 0;
  for (const auto& [alert, sink] : to_send) {
    if (!sink) continue;
    try {
      sink->send(alert);
    } catch (const Error&) {
      ++failures;
    }
  }
  std::lock_guard lock(misc_mutex_);
  ++stats_.ingested;
  stats_.alerts_fired += to_send.size();
  stats_.alert_delivery_failures += failures;
  for (auto& [alert, sink] : to_send) fired_.push_back(alert);
  return point;
}

SeriesPoint Collector::ingest(ByteView payload, Transport transport, const IngestMeta& meta) {
  SeriesPoint point;
  bool saturated = false;
  try {
    if (transport == Transport::JsonMqtt) {
      point = decode_json(std::string_view(reinterpret_cast<const char*>(payload.data()),
                                           payload.size()));
    } else {
      if (meta.sensor_id.empty()) {
        throw Error(ErrorCode::DecodeError, "LoRaWAN payload without sensor metadata");
      }
      const LoraFields f = decode_lorawan(payload);
      if (!lorawan_consistent(f)) {
        std::lock_guard lock(misc_mutex_);
        ++stats_.invariant_violations;
        throw Error(ErrorCode::InvariantViolation, "LoRaWAN total does not match its breakdown");
      }
      point = report_from_lorawan(f, meta.sensor_id, meta.reception_ts);
      saturated = f.total == 0xFFFF;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvariantViolation) throw;
    quarantine(payload, transport, e.what());
    throw Error(ErrorCode::DecodeError, e.what());
  }

  if (!saturated && !point.consistent()) {
    std::lock_guard lock(misc_mutex_);
    ++stats_.invariant_violations;
    throw Error(ErrorCode::InvariantViolation,
                "total " + std::to_string(point.total) + " != connected + probes_real + probes_virtual");
  }
  return store(std::move(point));
}

SeriesPoint Collector::ingest_text(std::string_view text, std::int64_t reception_ts) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (!j.is_discarded() && j.is_object() && j.contains("payload")) {
    IngestMeta meta;
    meta.reception_ts = reception_ts;
    std::optional<Bytes> payload;
    if (j["payload"].is_string()) payload = from_hex(j["payload"].get<std::string>());
    if (j.contains("sensor_id") && j["sensor_id"].is_string()) {
      meta.sensor_id = j["sensor_id"].get<std::string>();
    }
    if (j.contains("received_at") && j["received_at"].is_number_integer()) {
      meta.reception_ts = j["received_at"].get<std::int64_t>();
    }
    if (j.contains("port") && (!j["port"].is_number_unsigned() || j["port"] != kLorawanPort)) {
      quarantine(as_bytes(text), Transport::Lorawan, "unexpected LoRaWAN port");
      throw Error(ErrorCode::DecodeError, "unexpected LoRaWAN port");
    }
    if (!payload) {
      quarantine(as_bytes(text), Transport::Lorawan, "payload is not hex");
      throw Error(ErrorCode::DecodeError, "LoRaWAN envelope payload is not hex");
    }
    return ingest(*payload, Transport::Lorawan, meta);
  }
  return ingest(as_bytes(text), Transport::JsonMqtt);
}

IngestSummary Collector::ingest_ndjson(std::istream& in,
                                       const std::function<std::int64_t()>& clock) {
  IngestSummary summary;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++summary.lines;
    try {
      ingest_text(line, clock());
      ++summary.stored;
    } catch (const Error&) {
      ++summary.rejected;
    }
  }
  return summary;
}

std::vector<SeriesPoint> Collector::query(const std::string& sensor_id, std::int64_t t0,
                                          std::int64_t t1) const {
  if (t0 > t1) {
    throw Error(ErrorCode::InvalidArgument, "query bounds reversed: from > to");
  }
  std::vector<SeriesPoint> out;
  const Series* s = find_series(sensor_id);
  if (!s) return out;
  std::lock_guard lock(s->mutex);
  for (auto it = s->points.lower_bound(t0); it != s->points.end() && it->first <= t1;
       ++it) {
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::string> Collector::sensors() const {
  std::shared_lock lock(map_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : series_) out.push_back(id);
  return out;
}

std::string Collector::export_csv(const std::string& sensor_id, std::int64_t t0,
                                  std::int64_t t1) const {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& p : query(sensor_id, t0, t1)) {
    out << csv_field(p.sensor_id) << ',' << p.ts << ',' << p.window_s << ',' << p.connected << ','
        << p.probes_real << ',' << p.probes_virtual << ',' << p.total << '\n';
  }
  return out.str();
}

std::string Collector::export_json(const std::string& sensor_id, std::int64_t t0,
                                   std::int64_t t1) const {
  std::string out = "[";
  bool first = true;
  for (const auto& p : query(sensor_id, t0, t1)) {
    if (!first) out += ',';
    first = false;
    out += encode_json(p);
  }
  out += "]\n";
  return out;
}

CollectorStats Collector::stats() const {
  std::lock_guard lock(misc_mutex_);
  return stats_;
}

std::vector<Alert> Collector::fired_alerts() const {
  std::lock_guard lock(misc_mutex_);
  return fired_;
}

}  // namespace sttk
