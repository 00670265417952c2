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

#include "core/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "core/error.hpp"

namespace sttk {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, what);
}

template <typename T>
T field(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    invalid(std::string("config field '") + key + "' has the wrong type");
  }
}

std::vector<std::uint8_t> ie_list(const json& j, const char* key) {
  if (!j.is_array()) invalid(std::string(key) + " must be an array");
  std::vector<std::uint8_t> out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() > 255) {
      invalid(std::string(key) + " entries must be integers in 0..255");
    }
    out.push_back(static_cast<std::uint8_t>(v.get<int>()));
  }
  return out;
}

std::uint16_t port_field(const json& j, std::uint16_t fallback) {
  const auto port = field<std::int64_t>(j, "port", fallback);
  if (port <= 0 || port > 65535) invalid("port out of range");
  return static_cast<std::uint16_t>(port);
}

std::string salt_hex(Salt salt) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, salt.value);
  return buf;
}

Salt parse_salt(const std::string& text) {
  if (text.size() != 16 || text.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
    invalid("salt must be 16 hex digits");
  }
  return Salt{std::stoull(text, nullptr, 16)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write config " + path.string());
    out << text << '\n';
    if (!out.flush()) throw Error(ErrorCode::Io, "cannot write config " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

FingerprintConfig SensorConfig::fingerprint() const {
  return FingerprintConfig(included_ie_ids.value_or(FingerprintConfig::default_included()),
                           varying_ie_ids.value_or(FingerprintConfig::default_varying()));
}

std::filesystem::path SensorConfig::resolve(const std::string& path) const {
  if (path.empty()) return {};
  const std::filesystem::path p(path);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

SensorConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  const auto j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) invalid("config is not a JSON object");

  SensorConfig c;
  c.base_dir = base_dir;
  c.sensor_id = field<std::string>(j, "sensor_id", c.sensor_id);
  if (c.sensor_id.empty()) invalid("sensor_id must not be empty");
  c.window_s = field<std::int64_t>(j, "window_s", c.window_s);
  c.sample_period_s = field<std::int64_t>(j, "sample_period_s", c.sample_period_s);
  if (c.window_s <= 0) invalid("window_s must be positive");
  if (c.sample_period_s <= 0) invalid("sample_period_s must be positive");
  if (j.contains("salt") && !j["salt"].is_null()) c.salt = parse_salt(field<std::string>(j, "salt", ""));

  const auto transport = parse_transport(field<std::string>(j, "transport", "json_mqtt"));
  if (!transport) invalid("transport must be json_mqtt or lorawan");
  c.transport = *transport;

  if (j.contains("sink")) {
    const auto& s = j["sink"];
    if (!s.is_object()) invalid("sink must be an object");
    c.sink.type = field<std::string>(s, "type", c.sink.type);
    c.sink.path = field<std::string>(s, "path", "");
    c.sink.host = field<std::string>(s, "host", c.sink.host);
    c.sink.port = port_field(s, c.sink.port);
    c.sink.client_id = field<std::string>(s, "client_id", "");
    if (c.sink.type != "stdout" && c.sink.type != "file" && c.sink.type != "mqtt") {
      invalid("sink.type must be stdout, file or mqtt");
    }
    if (c.sink.type == "file" && c.sink.path.empty()) invalid("file sink needs a path");
  }

  if (j.contains("fingerprint")) {
    const auto& f = j["fingerprint"];
    if (!f.is_object()) invalid("fingerprint must be an object");
    if (f.contains("included_ie_ids")) c.included_ie_ids = ie_list(f["included_ie_ids"], "included_ie_ids");
    if (f.contains("varying_ie_ids")) c.varying_ie_ids = ie_list(f["varying_ie_ids"], "varying_ie_ids");
    try {
      (void)c.fingerprint();
    } catch (const Error& e) {
      invalid(e.what());
    }
  }

  c.oui_registry = field<std::string>(j, "oui_registry", "");
  c.journal = field<std::string>(j, "journal", "");
  c.queue_capacity = field<std::size_t>(j, "queue_capacity", c.queue_capacity);
  if (c.queue_capacity == 0) invalid("queue_capacity must be at least 1");

  if (j.contains("collector")) {
    const auto& cj = j["collector"];
    if (!cj.is_object()) invalid("collector must be an object");
    c.collector.store_dir = field<std::string>(cj, "store_dir", "");
    for (const auto& sj : cj.value("sources", json::array())) {
      SourceSettings src;
      src.type = field<std::string>(sj, "type", src.type);
      src.path = field<std::string>(sj, "path", "");
      src.host = field<std::string>(sj, "host", src.host);
      src.port = port_field(sj, src.port);
      src.topic = field<std::string>(sj, "topic", src.topic);
      if (src.type != "file" && src.type != "stdin" && src.type != "mqtt") {
        invalid("source type must be file, stdin or mqtt");
      }
      if (src.type == "file" && src.path.empty()) invalid("file source needs a path");
      c.collector.sources.push_back(std::move(src));
    }
    for (const auto& aj : cj.value("alerts", json::array())) {
      AlertPolicy p;
      p.name = field<std::string>(aj, "name", "");
      p.sensor_id = field<std::string>(aj, "sensor_id", std::string(AlertPolicy::kAnySensor));
      p.threshold = field<std::uint64_t>(aj, "threshold", 0);
      p.consecutive = field<std::uint32_t>(aj, "consecutive", 1);
      p.sink = field<std::string>(aj, "sink", "stdout");
      if (p.name.empty()) invalid("alert policies need a name");
      if (p.consecutive == 0) invalid("alert consecutive must be at least 1");
      c.collector.alerts.push_back(std::move(p));
    }
  }
  return c;
}

std::string config_json(const SensorConfig& c) {
  nlohmann::ordered_json j;
  j["sensor_id"] = c.sensor_id;
  j["window_s"] = c.window_s;
  j["sample_period_s"] = c.sample_period_s;
  if (c.salt) j["salt"] = salt_hex(*c.salt);
  j["transport"] = to_string(c.transport);
  nlohmann::ordered_json sink;
  sink["type"] = c.sink.type;
  if (!c.sink.path.empty()) sink["path"] = c.sink.path;
  if (c.sink.type == "mqtt") {
    sink["host"] = c.sink.host;
    sink["port"] = c.sink.port;
    if (!c.sink.client_id.empty()) sink["client_id"] = c.sink.client_id;
  }
  j["sink"] = sink;
  nlohmann::ordered_json fp;
  fp["included_ie_ids"] = c.included_ie_ids.value_or(FingerprintConfig::default_included());
  fp["varying_ie_ids"] = c.varying_ie_ids.value_or(FingerprintConfig::default_varying());
  j["fingerprint"] = fp;
  j["oui_registry"] = c.oui_registry;
  if (!c.journal.empty()) j["journal"] = c.journal;
  j["queue_capacity"] = c.queue_capacity;

  nlohmann::ordered_json col;
  col["store_dir"] = c.collector.store_dir;
  auto sources = nlohmann::ordered_json::array();
  for (const auto& s : c.collector.sources) {
    nlohmann::ordered_json sj;
    sj["type"] = s.type;
    if (s.type == "file") sj["path"] = s.path;
    if (s.type == "mqtt") {
      sj["host"] = s.host;
      sj["port"] = s.port;
      sj["topic"] = s.topic;
    }
    sources.push_back(sj);
  }
  col["sources"] = sources;
  auto alerts = nlohmann::ordered_json::array();
  for (const auto& a : c.collector.alerts) {
    alerts.push_back({{"name", a.name},
                      {"sensor_id", a.sensor_id},
                      {"threshold", a.threshold},
                      {"consecutive", a.consecutive},
                      {"sink", a.sink}});
  }
  col["alerts"] = alerts;
  j["collector"] = col;
  return j.dump(2);
}

SensorConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

void save_config(const SensorConfig& config, const std::filesystem::path& path) {
  write_file(path, config_json(config));
}

SensorConfig load_config_with_salt(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  SensorConfig c = parse_config(text, path.parent_path());
  if (c.salt) return c;
  c.salt = generate_salt();
  // Edit the document in place so unrelated keys and ordering survive.
  auto doc = nlohmann::ordered_json::parse(text);
  doc["salt"] = salt_hex(*c.salt);
  write_file(path, doc.dump(2));
  return c;
}

Salt generate_salt() {
  std::random_device rd;
  const std::uint64_t v = (std::uint64_t{rd()} << 32) ^ rd();
  return Salt{v};
}

std::optional<std::filesystem::path> resolve_config_path(std::string_view explicit_path) {
  if (!explicit_path.empty()) return std::filesystem::path(explicit_path);
  if (const char* env = std::getenv("STTK_CONFIG"); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

}  // namespace sttk
