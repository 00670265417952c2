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

#include "core/sensor.hpp"

#include "core/error.hpp"

namespace sttk {

namespace {

Timestamp first_tick_at_or_after(Timestamp ts, Duration period) {
  const auto us = micros_since_epoch(ts);
  const auto p = period.count();
  auto q = us / p;
  if (q * p < us) ++q;
  return Timestamp{Duration{q * p}};
}

}  // namespace

SensorSettings SensorSettings::from_config(const SensorConfig& config) {
  if (!config.salt) throw Error(ErrorCode::InvalidConfig, "config has no salt; run init first");
  SensorSettings s;
  s.sensor_id = config.sensor_id;
  s.window = seconds(config.window_s);
  s.sample_period = seconds(config.sample_period_s);
  s.fingerprint = config.fingerprint();
  s.salt = *config.salt;
  s.transport = config.transport;
  s.queue_capacity = config.queue_capacity;
  s.journal = config.resolve(config.journal);
  return s;
}

Sensor::Sensor(SensorSettings settings, const OuiRegistry& registry, Sink& sink)
    : settings_(std::move(settings)),
      detector_(settings_.fingerprint, registry, settings_.salt),
      store_(settings_.journal.empty() ? std::make_unique<WindowStore>()
                                       : std::make_unique<WindowStore>(settings_.journal)),
      publisher_(sink, settings_.transport, settings_.queue_capacity) {
  if (settings_.window <= Duration::zero() || settings_.sample_period <= Duration::zero()) {
    throw Error(ErrorCode::InvalidConfig, "window and sample period must be positive");
  }
}

void Sensor::ingest(const CaptureRecord& record) {
  if (finished_) throw Error(ErrorCode::InvalidArgument, "sensor already finished");
  if (!next_tick_) next_tick_ = first_tick_at_or_after(record.ts, settings_.sample_period);
  while (record.ts > *next_tick_) {
    tick(*next_tick_);
    *next_tick_ += settings_.sample_period;
  }

  ++stats_.frames;
  Frame frame;
  try {
    frame = parse_frame(record.frame, record.fcs_present);
  } catch (const Error&) {
    ++stats_.malformed_frames;
    return;
  }
  if (auto obs = detector_.process(frame, record.ts)) {
    ++stats_.observations;
    ++stats_.observations_by_kind[static_cast<std::size_t>(obs->kind)];
    store_->record(*obs);
  }
}

void Sensor::finish() {
  if (finished_) return;
  tick(next_tick_.value_or(Timestamp{}));
  finished_ = true;
}

void Sensor::run(CaptureSource& source) {
  while (auto record = source.next()) ingest(*record);
  finish();
  if (source.error()) throw *source.error();
}

void Sensor::tick(Timestamp now) {
  auto report = count_window(store_->snapshot(now, settings_.window), settings_.sensor_id, now,
                             settings_.window);
  const auto receipt = publisher_.publish(report);
  ++stats_.reports;
  if (receipt.delivered) ++stats_.reports_delivered;
  stats_.reports_delivered += receipt.flushed;
  stats_.reports_dropped += receipt.dropped;
  reports_.push_back(std::move(report));
  store_->prune(now, settings_.window);
}

std::unique_ptr<Sink> make_sink(const SensorConfig& config, std::ostream& out) {
  const auto& s = config.sink;
  if (s.type == "file") return std::make_unique<FileSink>(config.resolve(s.path));
  if (s.type == "mqtt") {
    return std::make_unique<MqttSink>(s.host, s.port,
                                      s.client_id.empty() ? "sttk-" + config.sensor_id : s.client_id);
  }
  return std::make_unique<StreamSink>(out);
}

std::filesystem::path registry_path(const SensorConfig& config) {
  if (!config.oui_registry.empty()) return config.resolve(config.oui_registry);
#ifdef STTK_DEFAULT_REGISTRY
  return STTK_DEFAULT_REGISTRY;
#else
  return "oui_registry.tsv";
#endif
}

}  // namespace sttk
