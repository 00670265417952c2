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

#include "sttk/sttk.h"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "core/collector.hpp"
#include "core/config.hpp"
#include "core/error.hpp"
#include "core/mqtt.hpp"
#include "core/oui_registry.hpp"
#include "core/sensor.hpp"
#include "core/simulator.hpp"
#include "core/uplink.hpp"

struct sttk_registry {
  sttk::OuiRegistry registry;
};

struct sttk_sensor {
  sttk::SensorConfig config;
  sttk::OuiRegistry registry;
  std::unique_ptr<sttk::Sink> sink;
  std::unique_ptr<sttk::Sensor> sensor;
  bool ran = false;
};

struct sttk_collector {
  std::unique_ptr<sttk::Collector> collector;
  sttk::SensorConfig config;
  bool has_config = false;
  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> lines_read{0};
  std::atomic<std::uint64_t> lines_rejected{0};
};

namespace {

thread_local std::string g_last_error;

sttk_status to_status(sttk::ErrorCode code) {
  using sttk::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return STTK_E_INVALID_ARGUMENT;
    case ErrorCode::Io: return STTK_E_IO;
    case ErrorCode::TooShort: return STTK_E_TOO_SHORT;
    case ErrorCode::BadMagic: return STTK_E_BAD_MAGIC;
    case ErrorCode::UnsupportedLinkType: return STTK_E_UNSUPPORTED_LINK_TYPE;
    case ErrorCode::TruncatedRecord: return STTK_E_TRUNCATED_RECORD;
    case ErrorCode::EmptyRegistry: return STTK_E_EMPTY_REGISTRY;
    case ErrorCode::BadVersion: return STTK_E_BAD_VERSION;
    case ErrorCode::BadLength: return STTK_E_BAD_LENGTH;
    case ErrorCode::DecodeError: return STTK_E_DECODE;
    case ErrorCode::InvariantViolation: return STTK_E_INVARIANT_VIOLATION;
    case ErrorCode::SinkUnavailable: return STTK_E_SINK_UNAVAILABLE;
    case ErrorCode::InvalidScenario: return STTK_E_INVALID_SCENARIO;
    case ErrorCode::InvalidConfig: return STTK_E_INVALID_CONFIG;
  }
  return STTK_E_INTERNAL;
}

sttk_status fail(sttk_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
sttk_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const sttk::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(STTK_E_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(STTK_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(STTK_E_INTERNAL, e.what());
  } catch (...) {
    return fail(STTK_E_INTERNAL, "unknown error");
  }
}

#define STTK_REQUIRE(cond, what) \
  if (!(cond)) return fail(STTK_E_INVALID_ARGUMENT, what)

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

sttk::CrowdingReport from_c(const sttk_report& r) {
  sttk::CrowdingReport out;
  out.sensor_id = r.sensor_id ? r.sensor_id : "";
  out.ts = r.ts;
  out.window_s = r.window_s;
  out.connected = r.connected;
  out.probes_real = r.probes_real;
  out.probes_virtual = r.probes_virtual;
  out.total = r.total;
  return out;
}

std::filesystem::path required_config(const char* path) {
  const auto resolved = sttk::resolve_config_path(path ? path : "");
  if (!resolved) {
    throw sttk::Error(sttk::ErrorCode::InvalidConfig, "no config given and STTK_CONFIG is unset");
  }
  return *resolved;
}

std::int64_t now_unix_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void ingest_stream(sttk_collector* c, std::istream& in) {
  const auto summary = c->collector->ingest_ndjson(in, now_unix_seconds);
  c->lines_read += summary.lines;
  c->lines_rejected += summary.rejected;
}

void ingest_path(sttk_collector* c, const std::string& path) {
  if (path == "-") {
    ingest_stream(c, std::cin);
    return;
  }
  std::ifstream in(path);
  if (!in) throw sttk::Error(sttk::ErrorCode::Io, "cannot open " + path);
  ingest_stream(c, in);
}

void run_mqtt_source(sttk_collector* c, const sttk::SourceSettings& src,
                     std::chrono::steady_clock::time_point deadline, bool bounded) {
  sttk::mqtt::Client client(src.host, src.port,
                            "sttk-collector-" + std::to_string(now_unix_seconds()));
  client.subscribe(src.topic);
  while (!c->stop.load()) {
    if (bounded && std::chrono::steady_clock::now() >= deadline) break;
    const auto msg = client.poll(std::chrono::milliseconds(200));
    if (!msg) continue;
    ++c->lines_read;
    const std::string text(msg->payload.begin(), msg->payload.end());
    try {
      c->collector->ingest_text(text, now_unix_seconds());
    } catch (const sttk::Error&) {
      ++c->lines_rejected;
    }
  }
  client.disconnect();
}

}  // namespace

extern "C" {

const char* sttk_last_error(void) { return g_last_error.c_str(); }

const char* sttk_status_name(sttk_status status) {
  switch (status) {
    case STTK_OK: return "ok";
    case STTK_E_INVALID_ARGUMENT: return "invalid argument";
    case STTK_E_IO: return "i/o error";
    case STTK_E_TOO_SHORT: return "frame too short";
    case STTK_E_BAD_MAGIC: return "bad pcap magic";
    case STTK_E_UNSUPPORTED_LINK_TYPE: return "unsupported link type";
    case STTK_E_TRUNCATED_RECORD: return "truncated record";
    case STTK_E_EMPTY_REGISTRY: return "empty registry";
    case STTK_E_BAD_VERSION: return "bad payload version";
    case STTK_E_BAD_LENGTH: return "bad payload length";
    case STTK_E_DECODE: return "decode error";
    case STTK_E_INVARIANT_VIOLATION: return "invariant violation";
    case STTK_E_SINK_UNAVAILABLE: return "sink unavailable";
    case STTK_E_INVALID_SCENARIO: return "invalid scenario";
    case STTK_E_INVALID_CONFIG: return "invalid config";
    case STTK_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* sttk_version(void) { return "1.0.0"; }

void sttk_free(void* buffer) { std::free(buffer); }

sttk_status sttk_lorawan_encode(const sttk_report* report, uint8_t out[STTK_LORAWAN_PAYLOAD_SIZE]) {
  STTK_REQUIRE(report && out, "null argument");
  return guarded([&] {
    const auto r = from_c(*report);
    if (!r.consistent()) return fail(STTK_E_INVARIANT_VIOLATION, "total != connected + probes_real + probes_virtual");
    const auto payload = sttk::encode_lorawan(r);
    std::memcpy(out, payload.data(), payload.size());
    return STTK_OK;
  });
}

sttk_status sttk_lorawan_decode(const uint8_t* payload, size_t length, sttk_lora_fields* out) {
  STTK_REQUIRE(out && (payload || length == 0), "null argument");
  return guarded([&] {
    const auto f = sttk::decode_lorawan(sttk::ByteView(payload, length));
    out->version = sttk::kLorawanVersion;
    out->total = f.total;
    out->connected = f.connected;
    out->probes_real = f.probes_real;
    out->probes_virtual = f.probes_virtual;
    out->window_min = f.window_min;
    return STTK_OK;
  });
}

sttk_status sttk_report_to_json(const sttk_report* report, char** json_out) {
  STTK_REQUIRE(report && json_out, "null argument");
  return guarded([&] {
    const auto r = from_c(*report);
    if (!r.consistent()) return fail(STTK_E_INVARIANT_VIOLATION, "total != connected + probes_real + probes_virtual");
    *json_out = dup_string(sttk::encode_json(r));
    return STTK_OK;
  });
}

sttk_status sttk_config_init(const char* path, const char* sensor_id, int overwrite) {
  STTK_REQUIRE(path && *path, "config path required");
  return guarded([&] {
    if (!overwrite && std::filesystem::exists(path)) {
      return fail(STTK_E_IO, std::string("refusing to overwrite existing ") + path);
    }
    sttk::SensorConfig c;
    if (sensor_id && *sensor_id) c.sensor_id = sensor_id;
    c.salt = sttk::generate_salt();
    c.oui_registry = sttk::registry_path(c).string();
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    sttk::save_config(c, path);
    return STTK_OK;
  });
}

sttk_status sttk_config_resolve(const char* path, char** resolved_out) {
  STTK_REQUIRE(resolved_out, "null argument");
  return guarded([&] {
    *resolved_out = dup_string(required_config(path).string());
    return STTK_OK;
  });
}

sttk_status sttk_registry_load(const char* path, sttk_registry** out) {
  STTK_REQUIRE(path && out, "null argument");
  return guarded([&] {
    auto r = std::make_unique<sttk_registry>();
    r->registry = sttk::OuiRegistry::load_file(path);
    *out = r.release();
    return STTK_OK;
  });
}

void sttk_registry_free(sttk_registry* registry) { delete registry; }

size_t sttk_registry_size(const sttk_registry* registry) {
  return registry ? registry->registry.size() : 0;
}

sttk_status sttk_registry_lookup(const sttk_registry* registry, const char* mac, int* is_mobile,
                                 char** vendor_out) {
  STTK_REQUIRE(registry && mac && is_mobile, "null argument");
  return guarded([&] {
    const auto addr = sttk::MacAddress::parse(mac);
    if (!addr) return fail(STTK_E_INVALID_ARGUMENT, std::string("not a MAC address: ") + mac);
    const auto* entry = registry->registry.find(addr->oui());
    *is_mobile = sttk::classify_mobile_oui(*addr, registry->registry) ? 1 : 0;
    if (vendor_out) *vendor_out = entry ? dup_string(entry->vendor) : nullptr;
    return STTK_OK;
  });
}

sttk_status sttk_registry_build(const char* manuf_path, const char* allowlist_path,
                                const char* out_path, sttk_registry_build_stats* stats) {
  STTK_REQUIRE(manuf_path && out_path, "null argument");
  return guarded([&] {
    std::ifstream manuf(manuf_path);
    if (!manuf) return fail(STTK_E_IO, std::string("cannot open ") + manuf_path);
    const std::string allow = allowlist_path ? allowlist_path : STTK_DEFAULT_ALLOWLIST;
    std::ifstream allow_in(allow);
    if (!allow_in) return fail(STTK_E_IO, "cannot open " + allow);

    sttk::ManufImportStats s;
    const auto registry = sttk::import_manuf(manuf, sttk::load_allowlist(allow_in), &s);
    if (registry.size() == 0) return fail(STTK_E_EMPTY_REGISTRY, "no prefixes in manuf file");
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) return fail(STTK_E_IO, std::string("cannot write ") + out_path);
    registry.save(out);
    if (!out.flush()) return fail(STTK_E_IO, std::string("cannot write ") + out_path);
    if (stats) {
      stats->entries = s.prefixes;
      stats->mobile = s.mobile;
      stats->ignored_blocks = s.ignored_blocks;
    }
    return STTK_OK;
  });
}

sttk_status sttk_sensor_open(const char* config_path, const char* out,
                             const sttk_sensor_overrides* overrides, sttk_sensor** sensor_out) {
  STTK_REQUIRE(sensor_out, "null argument");
  return guarded([&] {
    auto s = std::make_unique<sttk_sensor>();
    s->config = sttk::load_config_with_salt(required_config(config_path));
    if (overrides) {
      auto& c = s->config;
      if (overrides->sensor_id && *overrides->sensor_id) c.sensor_id = overrides->sensor_id;
      if (overrides->window_s < 0 || overrides->sample_period_s < 0) {
        return fail(STTK_E_INVALID_CONFIG, "window and sample period must be positive");
      }
      if (overrides->window_s > 0) c.window_s = overrides->window_s;
      if (overrides->sample_period_s > 0) c.sample_period_s = overrides->sample_period_s;
      if (overrides->transport) {
        const auto t = sttk::parse_transport(overrides->transport);
        if (!t) return fail(STTK_E_INVALID_CONFIG, "transport must be json_mqtt or lorawan");
        c.transport = *t;
      }
    }
    s->registry = sttk::OuiRegistry::load_file(sttk::registry_path(s->config));
    if (out == nullptr) {
      s->sink = sttk::make_sink(s->config, std::cout);
    } else if (std::strcmp(out, "stdout") == 0) {
      s->sink = std::make_unique<sttk::StreamSink>(std::cout);
    } else {
      s->sink = std::make_unique<sttk::FileSink>(out);
    }
    s->sensor = std::make_unique<sttk::Sensor>(sttk::SensorSettings::from_config(s->config),
                                               s->registry, *s->sink);
    *sensor_out = s.release();
    return STTK_OK;
  });
}

void sttk_sensor_free(sttk_sensor* sensor) { delete sensor; }

sttk_status sttk_sensor_run_pcap(sttk_sensor* sensor, const char* pcap_path) {
  STTK_REQUIRE(sensor && pcap_path, "null argument");
  STTK_REQUIRE(!sensor->ran, "sensor already ran a capture");
  return guarded([&] {
    sttk::PcapFileSource source(pcap_path);
    sensor->ran = true;
    sensor->sensor->run(source);
    return STTK_OK;
  });
}

sttk_status sttk_sensor_stats_get(const sttk_sensor* sensor, sttk_sensor_stats* out) {
  STTK_REQUIRE(sensor && out, "null argument");
  const auto& s = sensor->sensor->stats();
  out->frames = s.frames;
  out->malformed_frames = s.malformed_frames;
  out->observations = s.observations;
  out->observations_connected = s.observations_by_kind[0];
  out->observations_real_probe = s.observations_by_kind[1];
  out->observations_virtual = s.observations_by_kind[2];
  out->reports = s.reports;
  out->reports_delivered = s.reports_delivered;
  out->reports_dropped = s.reports_dropped;
  return STTK_OK;
}

size_t sttk_sensor_report_count(const sttk_sensor* sensor) {
  return sensor ? sensor->sensor->reports().size() : 0;
}

sttk_status sttk_sensor_report(const sttk_sensor* sensor, size_t index, sttk_report* report) {
  STTK_REQUIRE(sensor && report, "null argument");
  const auto& reports = sensor->sensor->reports();
  STTK_REQUIRE(index < reports.size(), "report index out of range");
  const auto& r = reports[index];
  report->sensor_id = r.sensor_id.c_str();
  report->ts = r.ts;
  report->window_s = r.window_s;
  report->connected = r.connected;
  report->probes_real = r.probes_real;
  report->probes_virtual = r.probes_virtual;
  report->total = r.total;
  return STTK_OK;
}

sttk_status sttk_simulate(const char* scenario_path, const char* out_dir,
                          sttk_simulation_stats* stats) {
  STTK_REQUIRE(scenario_path && out_dir, "null argument");
  return guarded([&] {
    const auto scenario = sttk::load_scenario(scenario_path);
    const auto result = sttk::generate(scenario);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    {
      std::ofstream pcap(dir / "trace.pcap", std::ios::binary | std::ios::trunc);
      pcap.write(reinterpret_cast<const char*>(result.pcap.data()),
                 static_cast<std::streamsize>(result.pcap.size()));
      if (!pcap.flush()) return fail(STTK_E_IO, "cannot write " + (dir / "trace.pcap").string());
    }
    {
      std::ofstream truth(dir / "truth.json", std::ios::trunc);
      truth << sttk::ground_truth_json(scenario, result.truth) << '\n';
      if (!truth.flush()) return fail(STTK_E_IO, "cannot write " + (dir / "truth.json").string());
    }
    if (stats) {
      stats->devices = result.truth.devices.size();
      stats->frames = result.truth.frames;
      stats->noise_frames = result.truth.noise_frames;
      stats->dropped_frames = result.truth.dropped_frames;
      stats->distinct_addresses = 0;
      for (const auto& d : result.truth.devices) stats->distinct_addresses += d.addresses.size();
    }
    return STTK_OK;
  });
}

sttk_status sttk_collector_open(const char* store_dir, sttk_collector** out) {
  STTK_REQUIRE(out, "null argument");
  return guarded([&] {
    auto c = std::make_unique<sttk_collector>();
    std::optional<std::filesystem::path> dir;
    if (store_dir && *store_dir) dir = store_dir;
    c->collector = std::make_unique<sttk::Collector>(dir);
    *out = c.release();
    return STTK_OK;
  });
}

sttk_status sttk_collector_open_config(const char* config_path, const char* store_dir,
                                       sttk_collector** out) {
  STTK_REQUIRE(out, "null argument");
  return guarded([&] {
    auto c = std::make_unique<sttk_collector>();
    c->config = sttk::load_config(required_config(config_path));
    c->has_config = true;
    std::optional<std::filesystem::path> dir;
    if (store_dir && *store_dir) {
      dir = store_dir;
    } else if (!c->config.collector.store_dir.empty()) {
      dir = c->config.resolve(c->config.collector.store_dir);
    }
    c->collector = std::make_unique<sttk::Collector>(dir);
    for (const auto& policy : c->config.collector.alerts) {
      c->collector->add_policy(policy, sttk::make_alert_sink(policy.sink, std::cout));
    }
    *out = c.release();
    return STTK_OK;
  });
}

void sttk_collector_free(sttk_collector* collector) { delete collector; }

sttk_status sttk_collector_add_policy(sttk_collector* collector, const char* name,
                                      const char* sensor_id, uint64_t threshold,
                                      uint32_t consecutive, const char* sink) {
  STTK_REQUIRE(collector && name && *name, "collector and policy name required");
  STTK_REQUIRE(consecutive >= 1, "consecutive must be at least 1");
  return guarded([&] {
    sttk::AlertPolicy p;
    p.name = name;
    if (sensor_id) p.sensor_id = sensor_id;
    p.threshold = threshold;
    p.consecutive = consecutive;
    p.sink = sink ? sink : "stdout";
    collector->collector->add_policy(p, sttk::make_alert_sink(p.sink, std::cout));
    return STTK_OK;
  });
}

sttk_status sttk_collector_ingest_line(sttk_collector* collector, const char* line,
                                       int64_t reception_ts) {
  STTK_REQUIRE(collector && line, "null argument");
  return guarded([&] {
    collector->collector->ingest_text(line, reception_ts);
    return STTK_OK;
  });
}

sttk_status sttk_collector_ingest_lorawan(sttk_collector* collector, const uint8_t* payload,
                                          size_t length, const char* sensor_id,
                                          int64_t reception_ts) {
  STTK_REQUIRE(collector && (payload || length == 0) && sensor_id && *sensor_id,
               "collector, payload and sensor id required");
  return guarded([&] {
    collector->collector->ingest(sttk::ByteView(payload, length), sttk::Transport::Lorawan,
                                 {sensor_id, reception_ts});
    return STTK_OK;
  });
}

sttk_status sttk_collector_ingest_file(sttk_collector* collector, const char* path) {
  STTK_REQUIRE(collector && path, "null argument");
  return guarded([&] {
    ingest_path(collector, path);
    return STTK_OK;
  });
}

sttk_status sttk_collector_run(sttk_collector* collector, double max_seconds) {
  STTK_REQUIRE(collector, "null argument");
  STTK_REQUIRE(collector->has_config, "collector was not opened from a config");
  return guarded([&] {
    const auto& sources = collector->config.collector.sources;
    if (sources.empty()) return fail(STTK_E_INVALID_CONFIG, "collector has no sources configured");
    const bool bounded = max_seconds > 0;
    const auto deadline =
        std::chrono::steady_clock::now() +
        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(bounded ? max_seconds : 0.0));

    std::vector<std::thread> listeners;
    std::vector<std::exception_ptr> errors;
    std::mutex errors_mutex;
    for (const auto& src : sources) {
      if (src.type != "mqtt") continue;
      listeners.emplace_back([&, src] {
        try {
          run_mqtt_source(collector, src, deadline, bounded);
        } catch (...) {
          std::lock_guard lock(errors_mutex);
          errors.push_back(std::current_exception());
          collector->stop.store(true);
        }
      });
    }
    std::exception_ptr file_error;
    try {
      for (const auto& src : sources) {
        if (src.type == "file") ingest_path(collector, collector->config.resolve(src.path).string());
        if (src.type == "stdin") ingest_path(collector, "-");
      }
    } catch (...) {
      file_error = std::current_exception();
      collector->stop.store(true);
    }
    for (auto& t : listeners) t.join();
    if (file_error) std::rethrow_exception(file_error);
    if (!errors.empty()) std::rethrow_exception(errors.front());
    return STTK_OK;
  });
}

void sttk_collector_stop(sttk_collector* collector) {
  if (collector) collector->stop.store(true);
}

sttk_status sttk_collector_export(const sttk_collector* collector, const char* sensor_id,
                                  int64_t t0, int64_t t1, const char* format, char** text_out) {
  STTK_REQUIRE(collector && sensor_id && format && text_out, "null argument");
  return guarded([&] {
    const std::string f = format;
    if (f == "csv") {
      *text_out = dup_string(collector->collector->export_csv(sensor_id, t0, t1));
    } else if (f == "json") {
      *text_out = dup_string(collector->collector->export_json(sensor_id, t0, t1));
    } else {
      return fail(STTK_E_INVALID_ARGUMENT, "format must be csv or json");
    }
    return STTK_OK;
  });
}

sttk_status sttk_collector_stats_get(const sttk_collector* collector, sttk_collector_stats* out) {
  STTK_REQUIRE(collector && out, "null argument");
  const auto s = collector->collector->stats();
  out->ingested = s.ingested;
  out->duplicates = s.duplicates;
  out->decode_errors = s.decode_errors;
  out->invariant_violations = s.invariant_violations;
  out->alerts_fired = s.alerts_fired;
  out->alert_delivery_failures = s.alert_delivery_failures;
  out->lines_read = collector->lines_read;
  out->lines_rejected = collector->lines_rejected;
  return STTK_OK;
}

}  // extern "C"
