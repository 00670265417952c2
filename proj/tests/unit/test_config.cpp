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

#include "doctest.h"

#include <cstdlib>

#include "core/config.hpp"
#include "core/error.hpp"
#include "support/test_support.hpp"

using namespace sttk;

TEST_CASE("defaults") {
  const auto c = parse_config("{}");
  CHECK(c.sensor_id == "sensor-1");
  CHECK(c.window_s == 300);
  CHECK(c.sample_period_s == 300);
  CHECK_FALSE(c.salt);
  CHECK(c.transport == Transport::JsonMqtt);
  CHECK(c.sink.type == "stdout");
  CHECK(c.queue_capacity == 100);
  CHECK(c.fingerprint().included_ie_ids() == FingerprintConfig::default_included());
  CHECK(c.fingerprint().varying_ie_ids() == FingerprintConfig::default_varying());
}

TEST_CASE("full document") {
  const auto c = parse_config(R"({
    "sensor_id": "hall-a", "window_s": 600, "sample_period_s": 60,
    "salt": "0123456789ABCDEF", "transport": "lorawan",
    "sink": {"type": "mqtt", "host": "broker.local", "port": 8883, "client_id": "edge"},
    "fingerprint": {"included_ie_ids": [1, 3, 221], "varying_ie_ids": [3, 221]},
    "oui_registry": "reg.tsv", "journal": "/var/lib/sttk/journal.ndjson",
    "queue_capacity": 7,
    "collector": {"store_dir": "store",
                  "sources": [{"type": "file", "path": "in.ndjson"},
                              {"type": "mqtt", "host": "h", "port": 1884}],
                  "alerts": [{"name": "busy", "threshold": 40, "consecutive": 2,
                              "sink": "http://127.0.0.1:9000/hook"}]}
  })",
                              "/etc/sttk");
  CHECK(c.sensor_id == "hall-a");
  CHECK(c.window_s == 600);
  CHECK(c.sample_period_s == 60);
  REQUIRE(c.salt);
  CHECK(c.salt->value == 0x0123456789ABCDEFull);
  CHECK(c.transport == Transport::Lorawan);
  CHECK(c.sink.type == "mqtt");
  CHECK(c.sink.host == "broker.local");
  CHECK(c.sink.port == 8883);
  CHECK(c.fingerprint().varies(221));
  CHECK(c.resolve(c.oui_registry) == std::filesystem::path("/etc/sttk/reg.tsv"));
  CHECK(c.resolve(c.journal) == std::filesystem::path("/var/lib/sttk/journal.ndjson"));
  CHECK(c.resolve("").empty());
  CHECK(c.queue_capacity == 7);
  REQUIRE(c.collector.sources.size() == 2);
  CHECK(c.collector.sources[1].topic == "sttk/v1/+/crowding");
  CHECK(c.collector.sources[1].port == 1884);
  REQUIRE(c.collector.alerts.size() == 1);
  CHECK(c.collector.alerts[0].sensor_id == "*");
  CHECK(c.collector.alerts[0].consecutive == 2);

  const auto again = parse_config(config_json(c), "/etc/sttk");
  CHECK(config_json(again) == config_json(c));
}

TEST_CASE("invalid documents") {
  const char* bad[] = {
      "[]",
      "not json",
      R"({"sensor_id": ""})",
      R"({"window_s": 0})",
      R"({"sample_period_s": -5})",
      R"({"window_s": "300"})",
      R"({"salt": "xyz"})",
      R"({"salt": "0123456789abcdef00"})",
      R"({"transport": "smoke-signal"})",
      R"({"sink": {"type": "file"}})",
      R"({"sink": {"type": "carrier"}})",
      R"({"sink": {"type": "mqtt", "port": 70000}})",
      R"({"fingerprint": {"included_ie_ids": [1], "varying_ie_ids": [3]}})",
      R"({"fingerprint": {"included_ie_ids": [300]}})",
      R"({"queue_capacity": 0})",
      R"({"collector": {"sources": [{"type": "ftp"}]}})",
      R"({"collector": {"alerts": [{"threshold": 3}]}})",
      R"({"collector": {"alerts": [{"name": "a", "consecutive": 0}]}})",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_config(text), Error);
  }
}

TEST_CASE("salt is generated once and persisted") {
  test::TempDir dir;
  const auto path = dir / "sensor.json";
  test::write_text(path, R"({"sensor_id": "lobby", "custom_key": {"kept": true}})");
  const auto first = load_config_with_salt(path);
  REQUIRE(first.salt);
  const auto text = test::read_text(path);
  CHECK(text.find("\"custom_key\"") != std::string::npos);
  CHECK(text.find("\"salt\"") != std::string::npos);

  const auto second = load_config_with_salt(path);
  REQUIRE(second.salt);
  CHECK(*second.salt == *first.salt);
  CHECK(test::read_text(path) == text);
  CHECK(load_config(path).salt == first.salt);
}

TEST_CASE("save and load") {
  test::TempDir dir;
  SensorConfig c;
  c.sensor_id = "x";
  c.salt = Salt{42};
  save_config(c, dir / "c.json");
  const auto loaded = load_config(dir / "c.json");
  CHECK(loaded.sensor_id == "x");
  CHECK(loaded.salt == Salt{42});
  CHECK(loaded.base_dir == dir.path());
  CHECK_FALSE(std::filesystem::exists(dir / "c.json.tmp"));
  CHECK_THROWS_AS(load_config(dir / "missing.json"), Error);
}

TEST_CASE("generated salts differ") {
  CHECK(generate_salt() != generate_salt());
}

TEST_CASE("STTK_CONFIG fallback") {
  const char* old = std::getenv("STTK_CONFIG");
  const std::string saved = old ? old : "";
  ::setenv("STTK_CONFIG", "/tmp/from-env.json", 1);
  CHECK(resolve_config_path("") == std::filesystem::path("/tmp/from-env.json"));
  CHECK(resolve_config_path("explicit.json") == std::filesystem::path("explicit.json"));
  ::unsetenv("STTK_CONFIG");
  CHECK_FALSE(resolve_config_path(""));
  if (old) ::setenv("STTK_CONFIG", saved.c_str(), 1);
}
