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

#ifndef STTK_STTK_H
#define STTK_STTK_H

#include <stddef.h>
#include <stdint.h>

#if defined(STTK_BUILDING_LIBRARY)
#define STTK_API __attribute__((visibility("default")))
#else
#define STTK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sttk_status {
  STTK_OK = 0,
  STTK_E_INVALID_ARGUMENT = 1,
  STTK_E_IO = 2,
  STTK_E_TOO_SHORT = 3,
  STTK_E_BAD_MAGIC = 4,
  STTK_E_UNSUPPORTED_LINK_TYPE = 5,
  STTK_E_TRUNCATED_RECORD = 6,
  STTK_E_EMPTY_REGISTRY = 7,
  STTK_E_BAD_VERSION = 8,
  STTK_E_BAD_LENGTH = 9,
  STTK_E_DECODE = 10,
  STTK_E_INVARIANT_VIOLATION = 11,
  STTK_E_SINK_UNAVAILABLE = 12,
  STTK_E_INVALID_SCENARIO = 13,
  STTK_E_INVALID_CONFIG = 14,
  STTK_E_INTERNAL = 99
} sttk_status;

/* Message of the last failed call on this thread; "" if none. */
STTK_API const char* sttk_last_error(void);
STTK_API const char* sttk_status_name(sttk_status status);
STTK_API const char* sttk_version(void);

/* Releases a buffer returned through a char** / uint8_t** out parameter. */
STTK_API void sttk_free(void* buffer);

/* ---- Reports and payload codecs ------------------------------------- */

typedef struct sttk_report {
  const char* sensor_id; /* borrowed; may be NULL on output-only paths */
  int64_t ts;            /* Unix seconds */
  uint32_t window_s;
  uint64_t connected;
  uint64_t probes_real;
  uint64_t probes_virtual;
  uint64_t total;
} sttk_report;

typedef struct sttk_lora_fields {
  uint8_t version;
  uint16_t total;
  uint16_t connected;
  uint16_t probes_real;
  uint16_t probes_virtual;
  uint8_t window_min;
} sttk_lora_fields;

#define STTK_LORAWAN_PAYLOAD_SIZE 10
#define STTK_LORAWAN_PORT 10

STTK_API sttk_status sttk_lorawan_encode(const sttk_report* report,
                                         uint8_t out[STTK_LORAWAN_PAYLOAD_SIZE]);
STTK_API sttk_status sttk_lorawan_decode(const uint8_t* payload, size_t length,
                                         sttk_lora_fields* out);

/* NUL-terminated report JSON; free with sttk_free. */
STTK_API sttk_status sttk_report_to_json(const sttk_report* report, char** json_out);

/* ---- Configuration -------------------------------------------------- */

/* Writes a default configuration with a freshly generated salt. Fails with
 * STTK_E_IO if the file exists and overwrite is 0. sensor_id may be NULL. */
STTK_API sttk_status sttk_config_init(const char* path, const char* sensor_id, int overwrite);

/* path if non-NULL and non-empty, else $STTK_CONFIG. Free with sttk_free. */
STTK_API sttk_status sttk_config_resolve(const char* path, char** resolved_out);

/* ---- OUI registry --------------------------------------------------- */

typedef struct sttk_registry sttk_registry;

STTK_API sttk_status sttk_registry_load(const char* path, sttk_registry** out);
STTK_API void sttk_registry_free(sttk_registry* registry);
STTK_API size_t sttk_registry_size(const sttk_registry* registry);

/* *is_mobile is 0 when the prefix is unknown. vendor_out may be NULL; when
 * set it receives the vendor name or NULL. Free with sttk_free. */
STTK_API sttk_status sttk_registry_lookup(const sttk_registry* registry, const char* mac,
                                          int* is_mobile, char** vendor_out);

typedef struct sttk_registry_build_stats {
  uint64_t entries;
  uint64_t mobile;
  uint64_t ignored_blocks; /* /28 and /36 assignments */
} sttk_registry_build_stats;

/* Builds a registry snapshot from a Wireshark-style manuf file. allowlist
 * may be NULL for the bundled data/mobile_vendors.txt. stats may be NULL. */
STTK_API sttk_status sttk_registry_build(const char* manuf_path, const char* allowlist_path,
                                         const char* out_path, sttk_registry_build_stats* stats);

/* ---- Sensor (edge pipeline) ----------------------------------------- */

typedef struct sttk_sensor sttk_sensor;

typedef struct sttk_sensor_stats {
  uint64_t frames;
  uint64_t malformed_frames;
  uint64_t observations;
  uint64_t observations_connected;
  uint64_t observations_real_probe;
  uint64_t observations_virtual;
  uint64_t reports;
  uint64_t reports_delivered;
  uint64_t reports_dropped;
} sttk_sensor_stats;

/* Values that replace the config file's. Zero / NULL fields are unset. */
typedef struct sttk_sensor_overrides {
  const char* sensor_id;
  int64_t window_s;
  int64_t sample_period_s;
  const char* transport; /* "json_mqtt" or "lorawan" */
} sttk_sensor_overrides;

/* Opens a sensor from a config file (NULL: $STTK_CONFIG); a missing salt is
 * generated and persisted. out selects the report destination: NULL uses the
 * configured sink, "stdout" writes NDJSON to standard output, anything else
 * is an NDJSON file path to append to. overrides may be NULL. */
STTK_API sttk_status sttk_sensor_open(const char* config_path, const char* out,
                                      const sttk_sensor_overrides* overrides,
                                      sttk_sensor** sensor_out);
STTK_API void sttk_sensor_free(sttk_sensor* sensor);

/* Replays a pcap through the sensor and emits its closing report. A sensor
 * runs one capture. Reports already emitted stay emitted on error. */
STTK_API sttk_status sttk_sensor_run_pcap(sttk_sensor* sensor, const char* pcap_path);

STTK_API sttk_status sttk_sensor_stats_get(const sttk_sensor* sensor, sttk_sensor_stats* out);
STTK_API size_t sttk_sensor_report_count(const sttk_sensor* sensor);
/* report->sensor_id points into the sensor and lives as long as it does. */
STTK_API sttk_status sttk_sensor_report(const sttk_sensor* sensor, size_t index,
                                        sttk_report* report);

/* ---- Simulator ------------------------------------------------------ */

typedef struct sttk_simulation_stats {
  uint64_t devices;
  uint64_t frames;
  uint64_t noise_frames;
  uint64_t dropped_frames;
  uint64_t distinct_addresses;
} sttk_simulation_stats;

/* Writes <out_dir>/trace.pcap and <out_dir>/truth.json. stats may be NULL. */
STTK_API sttk_status sttk_simulate(const char* scenario_path, const char* out_dir,
                                   sttk_simulation_stats* stats);

/* ---- Collector ------------------------------------------------------ */

typedef struct sttk_collector sttk_collector;

typedef struct sttk_collector_stats {
  uint64_t ingested;
  uint64_t duplicates;
  uint64_t decode_errors;
  uint64_t invariant_violations;
  uint64_t alerts_fired;
  uint64_t alert_delivery_failures;
  uint64_t lines_read;
  uint64_t lines_rejected;
} sttk_collector_stats;

/* store_dir may be NULL for a memory-only collector. */
STTK_API sttk_status sttk_collector_open(const char* store_dir, sttk_collector** out);
/* Uses the "collector" section of a config file (NULL: $STTK_CONFIG):
 * store, sources, alerts. store_dir, if non-NULL, replaces the store. */
STTK_API sttk_status sttk_collector_open_config(const char* config_path, const char* store_dir,
                                                sttk_collector** out);
STTK_API void sttk_collector_free(sttk_collector* collector);

/* Adds a policy. sensor_id NULL or "*" matches every sensor; sink NULL or
 * "stdout" prints alerts, an http:// URL receives a JSON POST. */
STTK_API sttk_status sttk_collector_add_policy(sttk_collector* collector, const char* name,
                                               const char* sensor_id, uint64_t threshold,
                                               uint32_t consecutive, const char* sink);

/* One report JSON or LoRaWAN envelope line. */
STTK_API sttk_status sttk_collector_ingest_line(sttk_collector* collector, const char* line,
                                                int64_t reception_ts);
/* LoRaWAN payload with routing metadata. */
STTK_API sttk_status sttk_collector_ingest_lorawan(sttk_collector* collector,
                                                   const uint8_t* payload, size_t length,
                                                   const char* sensor_id, int64_t reception_ts);
/* NDJSON file; "-" reads standard input. Bad lines are counted, not fatal. */
STTK_API sttk_status sttk_collector_ingest_file(sttk_collector* collector, const char* path);

/* Runs the configured sources: file and stdin sources once, MQTT sources
 * until sttk_collector_stop() or until max_seconds elapse (<= 0: no limit). */
STTK_API sttk_status sttk_collector_run(sttk_collector* collector, double max_seconds);
/* Async-signal-safe. */
STTK_API void sttk_collector_stop(sttk_collector* collector);

/* format is "csv" or "json". Free *text_out with sttk_free. */
STTK_API sttk_status sttk_collector_export(const sttk_collector* collector, const char* sensor_id,
                                           int64_t t0, int64_t t1, const char* format,
                                           char** text_out);
STTK_API sttk_status sttk_collector_stats_get(const sttk_collector* collector,
                                              sttk_collector_stats* out);

#ifdef __cplusplus
}
#endif

#endif /* STTK_STTK_H */
