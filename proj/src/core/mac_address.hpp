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
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace sttk {

class MacAddress {
 public:
  static constexpr std::size_t kSize = 6;
  using Octets = std::array<std::uint8_t, kSize>;

  constexpr MacAddress() = default;
  explicit constexpr MacAddress(const Octets& octets) : octets_(octets) {}

  // Reads exactly six octets; the span must be at least that long.
  static MacAddress from_bytes(std::span<const std::uint8_t> bytes);

  // Accepts "aa:bb:cc:dd:ee:ff" or "aa-bb-cc-dd-ee-ff", any case.
  static std::optional<MacAddress> parse(std::string_view text);

  static constexpr MacAddress broadcast() {
    return MacAddress{Octets{0xff, 0xff, 0xff, 0xff, 0xff, 0xff}};
  }

  constexpr const Octets& octets() const { return octets_; }

  // Bit 0x02 of the first octet: set for randomized / virtual addresses.
  constexpr bool locally_administered() const { return (octets_[0] & 0x02) != 0; }

  // Bit 0x01 of the first octet: multicast or broadcast.
  constexpr bool group() const { return (octets_[0] & 0x01) != 0; }

  // 24-bit vendor prefix, octets 0..2.
  constexpr std::uint32_t oui() const {
    return (std::uint32_t{octets_[0]} << 16) | (std::uint32_t{octets_[1]} << 8) |
           std::uint32_t{octets_[2]};
  }

  std::string to_string() const;

  friend constexpr auto operator<=>(const MacAddress&, const MacAddress&) = default;

 private:
  Octets octets_{};
};

constexpr bool is_locally_administered(const MacAddress& mac) {
  return mac.locally_administered();
}

std::string format_oui(std::uint32_t prefix);
std::optional<std::uint32_t> parse_oui(std::string_view text);

}  // namespace sttk

template <>
struct std::hash<sttk::MacAddress> {
  std::size_t operator()(const sttk::MacAddress& mac) const noexcept {
    std::uint64_t v = 0;
    for (auto o : mac.octets()) v = (v << 8) | o;
    return std::hash<std::uint64_t>{}(v);
  }
};
