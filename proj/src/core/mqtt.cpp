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

#include "core/mqtt.hpp"

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "core/error.hpp"

namespace sttk::mqtt {

namespace {

void append_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void append_string(Bytes& out, std::string_view s) {
  if (s.size() > 0xffff) throw Error(ErrorCode::InvalidArgument, "MQTT string too long");
  append_u16(out, static_cast<std::uint16_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

Bytes finish(std::uint8_t header, const Bytes& body) {
  Bytes out;
  out.reserve(body.size() + 5);
  out.push_back(header);
  append_remaining_length(out, body.size());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

[[noreturn]] void io_error(const std::string& what) {
  throw Error(ErrorCode::Io, what + ": " + std::strerror(errno));
}

}  // namespace

void append_remaining_length(Bytes& out, std::size_t length) {
  if (length > 268'435'455) throw Error(ErrorCode::InvalidArgument, "MQTT packet too large");
  do {
    std::uint8_t digit = length % 128;
    length /= 128;
    if (length > 0) digit |= 0x80;
    out.push_back(digit);
  } while (length > 0);
}

Bytes encode_connect(std::string_view client_id, std::uint16_t keepalive_s) {
  Bytes body;
  append_string(body, "MQTT");
  body.push_back(4);     // protocol level 3.1.1
  body.push_back(0x02);  // clean session
  append_u16(body, keepalive_s);
  append_string(body, client_id);
  return finish(0x10, body);
}

Bytes encode_connack(std::uint8_t return_code) { return Bytes{0x20, 0x02, 0x00, return_code}; }

Bytes encode_publish(std::string_view topic, ByteView payload) {
  Bytes body;
  append_string(body, topic);
  body.insert(body.end(), payload.begin(), payload.end());
  return finish(0x30, body);
}

Bytes encode_subscribe(std::uint16_t packet_id, std::string_view filter) {
  Bytes body;
  append_u16(body, packet_id);
  append_string(body, filter);
  body.push_back(0);  // requested QoS
  return finish(0x82, body);
}

Bytes encode_suback(std::uint16_t packet_id, std::uint8_t granted_qos) {
  Bytes body;
  append_u16(body, packet_id);
  body.push_back(granted_qos);
  return finish(0x90, body);
}

Bytes encode_pingreq() { return Bytes{0xC0, 0x00}; }
Bytes encode_disconnect() { return Bytes{0xE0, 0x00}; }

std::optional<Packet> take_packet(Bytes& buffer) {
  if (buffer.size() < 2) return std::nullopt;
  std::size_t length = 0;
  std::size_t multiplier = 1;
  std::size_t pos = 1;
  while (true) {
    if (pos >= buffer.size()) return std::nullopt;
    if (pos > 4) throw Error(ErrorCode::DecodeError, "MQTT remaining length overflow");
    const std::uint8_t digit = buffer[pos++];
    length += (digit & 0x7f) * multiplier;
    multiplier *= 128;
    if ((digit & 0x80) == 0) break;
  }
  if (buffer.size() < pos + length) return std::nullopt;
  Packet p;
  p.header = buffer[0];
  p.body.assign(buffer.begin() + static_cast<std::ptrdiff_t>(pos),
                buffer.begin() + static_cast<std::ptrdiff_t>(pos + length));
  buffer.erase(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(pos + length));
  return p;
}

PublishMessage decode_publish(const Packet& packet) {
  if (packet.type() != PacketType::Publish) {
    throw Error(ErrorCode::DecodeError, "not a PUBLISH packet");
  }
  const auto& b = packet.body;
  if (b.size() < 2) throw Error(ErrorCode::DecodeError, "PUBLISH without topic");
  const std::size_t topic_len = (std::size_t{b[0]} << 8) | b[1];
  std::size_t pos = 2 + topic_len;
  if (pos > b.size()) throw Error(ErrorCode::DecodeError, "PUBLISH topic overruns packet");
  const unsigned qos = (packet.header >> 1) & 0x3;
  if (qos > 0) pos += 2;  // packet identifier
  if (pos > b.size()) throw Error(ErrorCode::DecodeError, "PUBLISH packet id overruns packet");
  PublishMessage m;
  m.topic.assign(b.begin() + 2, b.begin() + 2 + static_cast<std::ptrdiff_t>(topic_len));
  m.payload.assign(b.begin() + static_cast<std::ptrdiff_t>(pos), b.end());
  return m;
}

bool topic_matches(std::string_view filter, std::string_view topic) {
  while (true) {
    const auto fs = filter.find('/');
    const auto ts = topic.find('/');
    const auto flevel = filter.substr(0, fs);
    const auto tlevel = topic.substr(0, ts);
    if (flevel == "#") return true;
    if (flevel != "+" && flevel != tlevel) return false;
    const bool fend = fs == std::string_view::npos;
    const bool tend = ts == std::string_view::npos;
    if (fend || tend) {
      // "a/#" also matches "a"
      return fend == tend || (tend && filter.substr(fs + 1) == "#");
    }
    filter.remove_prefix(fs + 1);
    topic.remove_prefix(ts + 1);
  }
}

Client::Client(const std::string& host, std::uint16_t port, const std::string& client_id,
               std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw Error(ErrorCode::Io, "cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd_ < 0) continue;
    if (::connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) io_error("cannot connect to MQTT broker " + host + ":" + service);

  send_all(encode_connect(client_id, 60));
  auto ack = read_packet(timeout_);
  if (!ack || ack->type() != PacketType::Connack || ack->body.size() != 2 || ack->body[1] != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(ErrorCode::Io, "MQTT broker refused the connection");
  }
}

Client::~Client() {
  if (fd_ >= 0) {
    try {
      disconnect();
    } catch (...) {
    }
  }
}

void Client::send_all(const Bytes& bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error("MQTT send failed");
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::optional<Packet> Client::read_packet(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    if (auto p = take_packet(inbox_)) return p;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      io_error("MQTT poll failed");
    }
    if (rc == 0) return std::nullopt;
    std::uint8_t buf[4096];
    const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    if (n == 0) throw Error(ErrorCode::Io, "MQTT broker closed the connection");
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error("MQTT recv failed");
    }
    inbox_.insert(inbox_.end(), buf, buf + n);
  }
}

void Client::publish(std::string_view topic, ByteView payload) {
  send_all(encode_publish(topic, payload));
}

void Client::subscribe(std::string_view filter) {
  const std::uint16_t id = next_packet_id_++;
  send_all(encode_subscribe(id, filter));
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (std::chrono::steady_clock::now() < deadline) {
    auto p = read_packet(timeout_);
    if (!p) break;
    if (p->type() == PacketType::Suback) {
      if (p->body.size() >= 3 && p->body[2] == 0x80) {
        throw Error(ErrorCode::Io, "MQTT broker rejected subscription " + std::string(filter));
      }
      return;
    }
  }
  throw Error(ErrorCode::Io, "no SUBACK for " + std::string(filter));
}

std::optional<PublishMessage> Client::poll(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() < 0) return std::nullopt;
    auto p = read_packet(left);
    if (!p) return std::nullopt;
    if (p->type() == PacketType::Publish) return decode_publish(*p);
  }
}

void Client::disconnect() {
  if (fd_ < 0) return;
  const int fd = fd_;
  try {
    send_all(encode_disconnect());
  } catch (...) {
  }
  ::close(fd);
  fd_ = -1;
}

}  // namespace sttk::mqtt
