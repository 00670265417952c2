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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core/mac_address.hpp"

namespace sttk {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

enum class FrameType : std::uint8_t { Management = 0, Control = 1, Data = 2, Extension = 3 };

// The two-byte Frame Control field. Every bit is kept so that encode() is the
// exact inverse of decode().
struct FrameControl {
  static constexpr std::uint8_t kToDs = 0x01;
  static constexpr std::uint8_t kFromDs = 0x02;
  static constexpr std::uint8_t kSubtypeProbeRequest = 4;
  static constexpr std::uint8_t kSubtypeBeacon = 8;
  static constexpr std::uint8_t kSubtypeQosFlag = 0x08;

  std::uint8_t protocol_version = 0;
  FrameType type = FrameType::Management;
  std::uint8_t subtype = 0;
  std::uint8_t flags = 0;

  constexpr bool to_ds() const { return (flags & kToDs) != 0; }
  constexpr bool from_ds() const { return (flags & kFromDs) != 0; }

  static constexpr FrameControl decode(std::uint8_t b0, std::uint8_t b1) {
    return FrameControl{static_cast<std::uint8_t>(b0 & 0x03),
                        static_cast<FrameType>((b0 >> 2) & 0x03),
                        static_cast<std::uint8_t>((b0 >> 4) & 0x0f), b1};
  }

  constexpr std::array<std::uint8_t, 2> encode() const {
    return {static_cast<std::uint8_t>((protocol_version & 0x03) |
                                      ((static_cast<std::uint8_t>(type) & 0x03) << 2) |
                                      ((subtype & 0x0f) << 4)),
            flags};
  }

  friend constexpr bool operator==(const FrameControl&, const FrameControl&) = default;
};

struct InformationElement {
  std::uint8_t id = 0;
  Bytes value;

  std::uint8_t length() const { return static_cast<std::uint8_t>(value.size()); }

  friend bool operator==(const InformationElement&, const InformationElement&) = default;
};

enum class FrameKind { ProbeRequest, Data, Other };

// Classification is a pure function of the Frame Control field.
constexpr FrameKind classify(const FrameControl& fc) {
  if (fc.type == FrameType::Management && fc.subtype == FrameControl::kSubtypeProbeRequest)
    return FrameKind::ProbeRequest;
  if (fc.type == FrameType::Data) return FrameKind::Data;
  return FrameKind::Other;
}

struct Frame {
  FrameKind kind = FrameKind::Other;
  FrameControl fc;
  std::uint16_t duration = 0;
  std::optional<MacAddress> addr1;
  std::optional<MacAddress> addr2;
  std::optional<MacAddress> addr3;
  std::optional<MacAddress> addr4;  // data frames with ToDS and FromDS both set
  std::uint16_t seq = 0;            // 12 bits
  std::uint8_t fragment = 0;        // 4 bits
  std::optional<std::uint16_t> qos_control;
  std::vector<InformationElement> ies;  // probe requests only
  Bytes body;                           // data payload, or the raw body of other frames

  // Source address of a probe request.
  const std::optional<MacAddress>& source() const { return addr2; }

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline constexpr std::size_t kMinFrameLength = 10;
inline constexpr std::size_t kMgmtHeaderLength = 24;

// Parses bytes that begin at the MAC header. Throws Error{TooShort} when the
// input is shorter than the header required by its kind. A truncated trailing
// IE ends IE extraction without failing the frame.
Frame parse_frame(ByteView raw);

// Same, after dropping a trailing 4-byte FCS when `fcs_present` is set.
Frame parse_frame(ByteView raw, bool fcs_present);

// TLV walk over a probe request body. Stops cleanly at the first element that
// does not fit.
std::vector<InformationElement> extract_ies(ByteView body);

// Inverse of parse_frame for frames whose optional fields are consistent with
// their Frame Control (what the simulator emits).
Bytes serialize_frame(const Frame& frame);

// Convenience constructors used by the simulator and tests.
Frame make_probe_request(const MacAddress& source, std::vector<InformationElement> ies,
                         std::uint16_t seq = 0);
Frame make_data_frame(const MacAddress& addr1, const MacAddress& addr2, const MacAddress& addr3,
                      bool to_ds, bool from_ds, std::uint16_t seq = 0, Bytes payload = {});
Frame make_beacon(const MacAddress& bssid, Bytes body, std::uint16_t seq = 0);

}  // namespace sttk
