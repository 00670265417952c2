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

#include "core/mac_address.hpp"

#include <cstdio>

#include "core/error.hpp"

namespace sttk {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Parses `count` colon- or dash-separated hex octets.
template <std::size_t N>
std::optional<std::array<std::uint8_t, N>> parse_octets(std::string_view text) {
  if (text.size() != N * 3 - 1) return std::nullopt;
  std::array<std::uint8_t, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t pos = i * 3;
    const int hi = hex_value(text[pos]);
    const int lo = hex_value(text[pos + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    if (i + 1 < N && text[pos + 2] != ':' && text[pos + 2] != '-') return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return out;
}

}  // namespace

MacAddress MacAddress::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kSize) {
    throw Error(ErrorCode::TooShort, "MAC address needs 6 bytes");
  }
  Octets o{};
  for (std::size_t i = 0; i < kSize; ++i) o[i] = bytes[i];
  return MacAddress{o};
}

std::optional<MacAddress> MacAddress::parse(std::string_view text) {
  auto octets = parse_octets<kSize>(text);
  if (!octets) return std::nullopt;
  return MacAddress{*octets};
}

std::string MacAddress::to_string() const {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", octets_[0], octets_[1],
                octets_[2], octets_[3], octets_[4], octets_[5]);
  return buf;
}

std::string format_oui(std::uint32_t prefix) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%02X:%02X:%02X", (prefix >> 16) & 0xff, (prefix >> 8) & 0xff,
                prefix & 0xff);
  return buf;
}

std::optional<std::uint32_t> parse_oui(std::string_view text) {
  auto octets = parse_octets<3>(text);
  if (!octets) return std::nullopt;
  return (std::uint32_t{(*octets)[0]} << 16) | (std::uint32_t{(*octets)[1]} << 8) |
         std::uint32_t{(*octets)[2]};
}

}  // namespace sttk
