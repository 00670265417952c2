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

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "core/frame.hpp"
#include "core/report.hpp"

namespace sttk {

namespace mqtt {
class Client;
}

enum class Transport { JsonMqtt, Lorawan };

std::string_view to_string(Transport t);
std::optional<Transport> parse_transport(std::string_view text);

inline constexpr std::uint8_t kLorawanPort = 10;
inline constexpr std::uint8_t kLorawanVersion = 1;
inline constexpr std::size_t kLorawanPayloadSize = 10;

std::string report_topic(std::string_view sensor_id);

// {"sensor_id":..,"ts":..,"window_s":..,"connected":..,"probes_real":..,
//  "probes_virtual":..,"total":..} with keys in exactly that order.
std::string encode_json(const CrowdingReport& report);

// Throws Error{DecodeError} on malformed JSON, missing keys or wrong types.
// Does not check the total; see CrowdingReport::consistent().
CrowdingReport decode_json(std::string_view text);

// 10 bytes, big-endian:
//   version u8 | total u16 | connected u16 | probes_real u16 |
//   probes_virtual u16 | window_min u8
// Counts saturate at 65535 and the window (in minutes) at 255.
using LoraPayload = std::array<std::uint8_t, kLorawanPayloadSize>;

struct LoraFields {
  std::uint16_t total = 0;
  std::uint16_t connected = 0;
  std::uint16_t probes_real = 0;
  std::uint16_t probes_virtual = 0;
  std::uint8_t window_min = 0;

  friend bool operator==(const LoraFields&, const LoraFields&) = default;
};

LoraPayload encode_lorawan(const CrowdingReport& report);

// Throws Error{BadLength} unless exactly 10 bytes, Error{BadVersion} unless
// the version byte is 1.
LoraFields decode_lorawan(ByteView bytes);

// Rebuilds a report from LoRaWAN fields; the network supplies sensor and time.
CrowdingReport report_from_lorawan(const LoraFields& fields, std::string sensor_id,
                                   std::int64_t ts);

// What a sink receives: the encoded payload plus routing metadata.
struct UplinkMessage {
  Transport transport = Transport::JsonMqtt;
  std::string sensor_id;
  std::string topic;      // JSON over MQTT
  std::uint8_t port = 0;  // LoRaWAN application port
  Bytes payload;
  std::int64_t ts = 0;  // report time; what a network server would stamp on receipt
};

// Text form of a message used by the stdout and file sinks: the report JSON
// itself for JSON messages, and for LoRaWAN an envelope
//   {"sensor_id":..,"port":10,"payload":"<hex>","received_at":<unix s>}
std::string ndjson_line(const UplinkMessage& message);

class Sink {
 public:
  virtual ~Sink() = default;
  // Throws Error{SinkUnavailable} when the message cannot be delivered now.
  virtual void deliver(const UplinkMessage& message) = 0;
};

class StreamSink final : public Sink {
 public:
  explicit StreamSink(std::ostream& out) : out_(out) {}
  void deliver(const UplinkMessage& message) override;

 private:
  std::ostream& out_;
};

// Appends one NDJSON line per message.
class FileSink final : public Sink {
 public:
  explicit FileSink(std::filesystem::path path);
  void deliver(const UplinkMessage& message) override;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class MemorySink final : public Sink {
 public:
  void deliver(const UplinkMessage& message) override;

  void set_available(bool available) { available_ = available; }
  const std::vector<UplinkMessage>& messages() const { return messages_; }

 private:
  bool available_ = true;
  std::vector<UplinkMessage> messages_;
};

// Publishes to an MQTT broker, connecting lazily and reconnecting after a
// failure. LoRaWAN messages are published as their NDJSON envelope.
class MqttSink final : public Sink {
 public:
  MqttSink(std::string host, std::uint16_t port, std::string client_id);
  ~MqttSink() override;
  void deliver(const UplinkMessage& message) override;

 private:
  std::string host_;
  std::uint16_t port_;
  std::string client_id_;
  std::unique_ptr<mqtt::Client> client_;
};

UplinkMessage make_message(const CrowdingReport& report, Transport transport);

struct DeliveryReceipt {
  bool delivered = false;     // this report reached the sink
  std::size_t flushed = 0;    // earlier queued reports delivered by this call
  std::size_t queued = 0;     // reports waiting after this call
  std::size_t dropped = 0;    // reports discarded by this call
};

// Serializes publishing for one sensor. When the sink is down, reports wait in
// a bounded FIFO (oldest dropped beyond capacity) and are retried, in order,
// before the next report.
class Publisher {
 public:
  static constexpr std::size_t kDefaultCapacity = 100;

  Publisher(Sink& sink, Transport transport, std::size_t capacity = kDefaultCapacity);

  DeliveryReceipt publish(const CrowdingReport& report);

  std::size_t queued() const;
  std::size_t dropped_total() const { return dropped_total_; }
  Transport transport() const { return transport_; }

 private:
  Sink& sink_;
  Transport transport_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::deque<UplinkMessage> backlog_;
  std::size_t dropped_total_ = 0;
};

}  // namespace sttk
