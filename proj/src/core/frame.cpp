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

#include "core/frame.hpp"

#include <string>

#include "core/error.hpp"

namespace sttk {

namespace {

std::uint16_t read_le16(ByteView b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

void append_le16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_mac(Bytes& out, const MacAddress& mac) {
  out.insert(out.end(), mac.octets().begin(), mac.octets().end());
}

[[noreturn]] void too_short(std::size_t have, std::size_t need, const char* what) {
  throw Error(ErrorCode::TooShort, std::string(what) + " needs " + std::to_string(need) +
                                       " bytes, got " + std::to_string(have));
}

void read_seq_control(Frame& f, ByteView raw, std::size_t off) {
  const std::uint16_t sc = read_le16(raw, off);
  f.fragment = static_cast<std::uint8_t>(sc & 0x0f);
  f.seq = static_cast<std::uint16_t>(sc >> 4);
}

}  // namespace

std::vector<InformationElement> extract_ies(ByteView body) {
  std::vector<InformationElement> ies;
  std::size_t pos = 0;
  while (pos + 2 <= body.size()) {
    const std::uint8_t id = body[pos];
    const std::size_t len = body[pos + 1];
    if (pos + 2 + len > body.size()) break;
    const auto value = body.subspan(pos + 2, len);
    ies.push_back(InformationElement{id, Bytes(value.begin(), value.end())});
    pos += 2 + len;
  }
  return ies;
}

Frame parse_frame(ByteView raw, bool fcs_present) {
  if (fcs_present) {
    if (raw.size() < kMinFrameLength + 4) too_short(raw.size(), kMinFrameLength + 4, "frame+FCS");
    raw = raw.first(raw.size() - 4);
  }
  return parse_frame(raw);
}

Frame parse_frame(ByteView raw) {
  if (raw.size() < kMinFrameLength) too_short(raw.size(), kMinFrameLength, "frame");

  Frame f;
  f.fc = FrameControl::decode(raw[0], raw[1]);
  f.kind = classify(f.fc);
  f.duration = read_le16(raw, 2);
  f.addr1 = MacAddress::from_bytes(raw.subspan(4));

  switch (f.kind) {
    case FrameKind::ProbeRequest: {
      if (raw.size() < kMgmtHeaderLength) too_short(raw.size(), kMgmtHeaderLength, "probe request");
      f.addr2 = MacAddress::from_bytes(raw.subspan(10));
      f.addr3 = MacAddress::from_bytes(raw.subspan(16));
      read_seq_control(f, raw, 22);
      f.ies = extract_ies(raw.subspan(kMgmtHeaderLength));
      break;
    }
    case FrameKind::Data: {
      const bool wds = f.fc.to_ds() && f.fc.from_ds();
      const bool qos = (f.fc.subtype & FrameControl::kSubtypeQosFlag) != 0;
      const std::size_t need = kMgmtHeaderLength + (wds ? 6 : 0) + (qos ? 2 : 0);
      if (raw.size() < need) too_short(raw.size(), need, "data frame");
      f.addr2 = MacAddress::from_bytes(raw.subspan(10));
      f.addr3 = MacAddress::from_bytes(raw.subspan(16));
      read_seq_control(f, raw, 22);
      std::size_t pos = kMgmtHeaderLength;
      if (wds) {
        f.addr4 = MacAddress::from_bytes(raw.subspan(pos));
        pos += 6;
      }
      if (qos) {
        f.qos_control = read_le16(raw, pos);
        pos += 2;
      }
      f.body.assign(raw.begin() + static_cast<std::ptrdiff_t>(pos), raw.end());
      break;
    }
    case FrameKind::Other: {
      std::size_t pos = kMinFrameLength;
      if (raw.size() >= 16) {
        f.addr2 = MacAddress::from_bytes(raw.subspan(10));
        pos = 16;
      }
      if (f.fc.type == FrameType::Management && raw.size() >= kMgmtHeaderLength) {
        f.addr3 = MacAddress::from_bytes(raw.subspan(16));
        read_seq_control(f, raw, 22);
        pos = kMgmtHeaderLength;
      }
      f.body.assign(raw.begin() + static_cast<std::ptrdiff_t>(pos), raw.end());
      break;
    }
  }
  return f;
}

Bytes serialize_frame(const Frame& frame) {
  Bytes out;
  out.reserve(kMgmtHeaderLength + frame.body.size() + 64);
  const auto fc = frame.fc.encode();
  out.insert(out.end(), fc.begin(), fc.end());
  append_le16(out, frame.duration);
  append_mac(out, frame.addr1.value_or(MacAddress{}));
  if (frame.addr2) append_mac(out, *frame.addr2);
  if (frame.addr3) {
    append_mac(out, *frame.addr3);
    append_le16(out, static_cast<std::uint16_t>((frame.seq << 4) | (frame.fragment & 0x0f)));
  }
  if (frame.addr4) append_mac(out, *frame.addr4);
  if (frame.qos_control) append_le16(out, *frame.qos_control);
  for (const auto& ie : frame.ies) {
    out.push_back(ie.id);
    out.push_back(ie.length());
    out.insert(out.end(), ie.value.begin(), ie.value.end());
  }
  out.insert(out.end(), frame.body.begin(), frame.body.end());
  return out;
}

Frame make_probe_request(const MacAddress& source, std::vector<InformationElement> ies,
                         std::uint16_t seq) {
  Frame f;
  f.fc = FrameControl{0, FrameType::Management, FrameControl::kSubtypeProbeRequest, 0};
  f.kind = FrameKind::ProbeRequest;
  f.addr1 = MacAddress::broadcast();
  f.addr2 = source;
  f.addr3 = MacAddress::broadcast();
  f.seq = seq & 0x0fff;
  f.ies = std::move(ies);
  return f;
}

Frame make_data_frame(const MacAddress& addr1, const MacAddress& addr2, const MacAddress& addr3,
                      bool to_ds, bool from_ds, std::uint16_t seq, Bytes payload) {
  Frame f;
  std::uint8_t flags = 0;
  if (to_ds) flags |= FrameControl::kToDs;
  if (from_ds) flags |= FrameControl::kFromDs;
  f.fc = FrameControl{0, FrameType::Data, 0, flags};
  f.kind = FrameKind::Data;
  f.duration = 44;
  f.addr1 = addr1;
  f.addr2 = addr2;
  f.addr3 = addr3;
  if (to_ds && from_ds) f.addr4 = addr2;
  f.seq = seq & 0x0fff;
  f.body = std::move(payload);
  return f;
}

Frame make_beacon(const MacAddress& bssid, Bytes body, std::uint16_t seq) {
  Frame f;
  f.fc = FrameControl{0, FrameType::Management, FrameControl::kSubtypeBeacon, 0};
  f.kind = FrameKind::Other;
  f.addr1 = MacAddress::broadcast();
  f.addr2 = bssid;
  f.addr3 = bssid;
  f.seq = seq & 0x0fff;
  f.body = std::move(body);
  return f;
}

}  // namespace sttk
