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

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "core/frame.hpp"

// Just enough MQTT 3.1.1 for QoS 0 publish and subscribe.
namespace sttk::mqtt {

enum class PacketType : std::uint8_t {
  Connect = 1,
  Connack = 2,
  Publish = 3,
  Subscribe = 8,
  Suback = 9,
  Pingreq = 12,
  Pingresp = 13,
  Disconnect = 14,
};

struct Packet {
  std::uint8_t header = 0;  // type << 4 | flags
  Bytes body;

  PacketType type() const { return static_cast<PacketType>(header >> 4); }
};

struct PublishMessage {
  std::string topic;
  Bytes payload;
};

void append_remaining_length(Bytes& out, std::size_t length);

Bytes encode_connect(std::string_view client_id, std::uint16_t keepalive_s);
Bytes encode_connack(std::uint8_t return_code);
Bytes encode_publish(std::string_view topic, ByteView payload);
Bytes encode_subscribe(std::uint16_t packet_id, std::string_view filter);
Bytes encode_suback(std::uint16_t packet_id, std::uint8_t granted_qos);
Bytes encode_pingreq();
Bytes encode_disconnect();

// Pops one complete packet from the front of `buffer`, if there is one.
// Throws Error{DecodeError} on a malformed length prefix.
std::optional<Packet> take_packet(Bytes& buffer);

// Throws Error{DecodeError} when the packet is not a well-formed QoS 0 publish.
PublishMessage decode_publish(const Packet& packet);

// MQTT topic filter match with '+' and '#' wildcards.
bool topic_matches(std::string_view filter, std::string_view topic);

// Blocking TCP client. Connection or socket failures throw Error{Io}.
class Client {
 public:
  Client(const std::string& host, std::uint16_t port, const std::string& client_id,
         std::chrono::milliseconds timeout = std::chrono::seconds(5));
  ~Client();

  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  void publish(std::string_view topic, ByteView payload);
  void subscribe(std::string_view filter);

  // Waits up to `timeout` for the next PUBLISH; other packets are consumed.
  std::optional<PublishMessage> poll(std::chrono::milliseconds timeout);

  void disconnect();

 private:
  void send_all(const Bytes& bytes);
  std::optional<Packet> read_packet(std::chrono::milliseconds timeout);

  int fd_ = -1;
  std::chrono::milliseconds timeout_;
  Bytes inbox_;
  std::uint16_t next_packet_id_ = 1;
};

}  // namespace sttk::mqtt
