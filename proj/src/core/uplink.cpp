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

#include "core/uplink.hpp"

#include <algorithm>
#include <limits>

#include "json.hpp"

#include "core/error.hpp"
#include "core/hex.hpp"
#include "core/mqtt.hpp"

namespace sttk {

namespace {

std::uint16_t saturate16(std::uint64_t v) {
  return static_cast<std::uint16_t>(std::min<std::uint64_t>(v, 0xFFFF));
}

void put_be16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 8);
  p[1] = static_cast<std::uint8_t>(v & 0xff);
}

std::uint16_t get_be16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

template <typename T>
T require_unsigned(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  // The parser stores every non-negative integer literal as unsigned.
  if (it == j.end() || !it->is_number_unsigned()) {
    throw Error(ErrorCode::DecodeError,
                std::string("missing or non-negative-integer field '") + key + "'");
  }
  const auto v = it->get<std::uint64_t>();
  if (v > std::numeric_limits<T>::max()) {
    throw Error(ErrorCode::DecodeError, std::string("field '") + key + "' out of range");
  }
  return static_cast<T>(v);
}

}  // namespace

std::string_view to_string(Transport t) {
  return t == Transport::JsonMqtt ? "json_mqtt" : "lorawan";
}

std::optional<Transport> parse_transport(std::string_view text) {
  if (text == "json_mqtt" || text == "json") return Transport::JsonMqtt;
  if (text == "lorawan") return Transport::Lorawan;
  return std::nullopt;
}

std::string report_topic(std::string_view sensor_id) {
  std::string topic = "sttk/v1/";
  topic += sensor_id;
  topic += "/crowding";
  return topic;
}

std::string encode_json(const CrowdingReport& r) {
  nlohmann::ordered_json j;
  j["sensor_id"] = r.sensor_id;
  j["ts"] = r.ts;
  j["window_s"] = r.window_s;
  j["connected"] = r.connected;
  j["probes_real"] = r.probes_real;
  j["probes_virtual"] = r.probes_virtual;
  j["total"] = r.total;
  return j.dump();
}

CrowdingReport decode_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::DecodeError, "report is not a JSON object");
  }
  CrowdingReport r;
  const auto sid = j.find("sensor_id");
  if (sid == j.end() || !sid->is_string() || sid->get<std::string>().empty()) {
    throw Error(ErrorCode::DecodeError, "missing sensor_id");
  }
  r.sensor_id = sid->get<std::string>();
  const auto ts = j.find("ts");
  if (ts == j.end() || !ts->is_number_integer()) {
    throw Error(ErrorCode::DecodeError, "missing or non-integer field 'ts'");
  }
  r.ts = ts->get<std::int64_t>();
  r.window_s = require_unsigned<std::uint32_t>(j, "window_s");
  r.connected = require_unsigned<std::uint64_t>(j, "connected");
  r.probes_real = require_unsigned<std::uint64_t>(j, "probes_real");
  r.probes_virtual = require_unsigned<std::uint64_t>(j, "probes_virtual");
  r.total = require_unsigned<std::uint64_t>(j, "total");
  return r;
}

LoraPayload encode_lorawan(const CrowdingReport& r) {
  LoraPayload p{};
  p[0] = kLorawanVersion;
  put_be16(&p[1], saturate16(r.total));
  put_be16(&p[3], saturate16(r.connected));
  put_be16(&p[5], saturate16(r.probes_real));
  put_be16(&p[7], saturate16(r.probes_virtual));
  p[9] = static_cast<std::uint8_t>(std::min<std::uint32_t>(r.window_s / 60, 0xFF));
  return p;
}

LoraFields decode_lorawan(ByteView bytes) {
  if (bytes.size() != kLorawanPayloadSize) {
    throw Error(ErrorCode::BadLength,
                "LoRaWAN payload must be 10 bytes, got " + std::to_string(bytes.size()));
  }
  if (bytes[0] != kLorawanVersion) {
    throw Error(ErrorCode::BadVersion,
                "unsupported LoRaWAN payload version " + std::to_string(bytes[0]));
  }
  LoraFields f;
  f.total = get_be16(&bytes[1]);
  f.connected = get_be16(&bytes[3]);
  f.probes_real = get_be16(&bytes[5]);
  f.probes_virtual = get_be16(&bytes[7]);
  f.window_min = bytes[9];
  return f;
}

CrowdingReport report_from_lorawan(const LoraFields& f, std::string sensor_id, std::int64_t ts) {
  CrowdingReport r;
  r.sensor_id = std::move(sensor_id);
  r.ts = ts;
  r.window_s = std::uint32_t{f.window_min} * 60;
  r.connected = f.connected;
  r.probes_real = f.probes_real;
  r.probes_virtual = f.probes_virtual;
  r.total = f.total;
  return r;
}

UplinkMessage make_message(const CrowdingReport& report, Transport transport) {
  UplinkMessage m;
  m.transport = transport;
  m.sensor_id = report.sensor_id;
  m.ts = report.ts;
  if (transport == Transport::JsonMqtt) {
    m.topic = report_topic(report.sensor_id);
    const std::string json = encode_json(report);
    m.payload.assign(json.begin(), json.end());
  } else {
    m.port = kLorawanPort;
    const auto p = encode_lorawan(report);
    m.payload.assign(p.begin(), p.end());
  }
  return m;
}

std::string ndjson_line(const UplinkMessage& m) {
  if (m.transport == Transport::JsonMqtt) {
    return std::string(m.payload.begin(), m.payload.end());
  }
  nlohmann::ordered_json j;
  j["sensor_id"] = m.sensor_id;
  j["port"] = m.port;
  j["payload"] = to_hex(m.payload);
  j["received_at"] = m.ts;
  return j.dump();
}

void StreamSink::deliver(const UplinkMessage& message) {
  out_ << ndjson_line(message) << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorCode::SinkUnavailable, "output stream failed");
}

FileSink::FileSink(std::filesystem::path path) : path_(std::move(path)) {
  out_.open(path_, std::ios::app);
  if (!out_) throw Error(ErrorCode::Io, "cannot open sink file " + path_.string());
}

void FileSink::deliver(const UplinkMessage& message) {
  out_ << ndjson_line(message) << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorCode::SinkUnavailable, "write to " + path_.string() + " failed");
}

void MemorySink::deliver(const UplinkMessage& message) {
  if (!available_) throw Error(ErrorCode::SinkUnavailable, "memory sink marked unavailable");
  messages_.push_back(message);
}

MqttSink::MqttSink(std::string host, std::uint16_t port, std::string client_id)
    : host_(std::move(host)), port_(port), client_id_(std::move(client_id)) {}

MqttSink::~MqttSink() = default;

void MqttSink::deliver(const UplinkMessage& message) {
  try {
    if (!client_) client_ = std::make_unique<mqtt::Client>(host_, port_, client_id_);
    if (message.transport == Transport::JsonMqtt) {
      client_->publish(message.topic, message.payload);
    } else {
      const std::string env = ndjson_line(message);
      client_->publish(report_topic(message.sensor_id),
                       ByteView(reinterpret_cast<const std::uint8_t*>(env.data()), env.size()));
    }
  } catch (const Error& e) {
    client_.reset();
    throw Error(ErrorCode::SinkUnavailable, e.what());
  }
}

Publisher::Publisher(Sink& sink, Transport transport, std::size_t capacity)
    : sink_(sink), transport_(transport), capacity_(std::max<std::size_t>(capacity, 1)) {}

DeliveryReceipt Publisher::publish(const CrowdingReport& report) {
  std::lock_guard lock(mutex_);
  DeliveryReceipt receipt;
  backlog_.push_back(make_message(report, transport_));
  while (!backlog_.empty()) {
    try {
      sink_.deliver(backlog_.front());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SinkUnavailable) throw;
      break;
    }
    backlog_.pop_front();
    if (backlog_.empty()) {
      receipt.delivered = true;
    } else {
      ++receipt.flushed;
    }
  }
  while (backlog_.size() > capacity_) {
    backlog_.pop_front();
    ++receipt.dropped;
    ++dropped_total_;
  }
  receipt.queued = backlog_.size();
  return receipt;
}

std::size_t Publisher::queued() const {
  std::lock_guard lock(mutex_);
  return backlog_.size();
}

}  // namespace sttk
