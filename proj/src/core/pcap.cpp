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

#include "core/pcap.hpp"

#include <array>
#include <string>

namespace sttk {

namespace {

constexpr std::uint32_t kMagicMicros = 0xA1B2C3D4;
constexpr std::uint32_t kMagicMicrosSwapped = 0xD4C3B2A1;
constexpr std::size_t kGlobalHeaderSize = 24;
constexpr std::size_t kRecordHeaderSize = 16;
constexpr std::uint32_t kMaxRecordSize = 1u << 20;

constexpr std::uint8_t kRadiotapFlagFcs = 0x10;

std::uint32_t load_le32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

std::uint32_t load_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

void store_le32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void store_le16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

bool read_exact(std::istream& in, std::uint8_t* dst, std::size_t n, std::size_t& got) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  got = static_cast<std::size_t>(in.gcount());
  return got == n;
}

}  // namespace

Bytes strip_radiotap(ByteView packet) {
  if (packet.size() < 4) {
    throw Error(ErrorCode::TruncatedRecord, "radiotap header needs 4 bytes");
  }
  const std::size_t declared = packet[2] | (packet[3] << 8);
  if (declared > packet.size()) {
    throw Error(ErrorCode::TruncatedRecord, "radiotap length " + std::to_string(declared) +
                                                " exceeds packet length " +
                                                std::to_string(packet.size()));
  }
  return Bytes(packet.begin() + static_cast<std::ptrdiff_t>(declared), packet.end());
}

bool radiotap_reports_fcs(ByteView packet) {
  if (packet.size() < 8) return false;
  const std::size_t header_len = packet[2] | (packet[3] << 8);
  if (header_len > packet.size()) return false;

  const std::uint32_t first = load_le32(&packet[4]);
  if ((first & 0x2) == 0) return false;  // no Flags field

  std::size_t off = 4;
  std::uint32_t word = first;
  while (true) {
    off += 4;
    if ((word & 0x80000000u) == 0) break;
    if (off + 4 > header_len) return false;
    word = load_le32(&packet[off]);
  }
  if (first & 0x1) {  // TSFT: u64, 8-byte aligned
    off = (off + 7) & ~std::size_t{7};
    off += 8;
  }
  if (off >= header_len) return false;
  return (packet[off] & kRadiotapFlagFcs) != 0;
}

MemorySource::MemorySource(std::vector<CaptureRecord> records)
    : records_(std::make_move_iterator(records.begin()), std::make_move_iterator(records.end())) {}

std::optional<CaptureRecord> MemorySource::next() {
  if (records_.empty()) return std::nullopt;
  CaptureRecord r = std::move(records_.front());
  records_.pop_front();
  return r;
}

PcapReader::PcapReader(std::istream& in) : in_(in) {
  std::array<std::uint8_t, kGlobalHeaderSize> hdr{};
  std::size_t got = 0;
  if (!read_exact(in_, hdr.data(), hdr.size(), got)) {
    if (got < 4) throw Error(ErrorCode::BadMagic, "stream too short for a pcap header");
    throw Error(ErrorCode::TruncatedRecord, "truncated pcap global header");
  }
  const std::uint32_t magic = load_le32(hdr.data());
  if (magic == kMagicMicros) {
    swapped_ = false;
  } else if (magic == kMagicMicrosSwapped) {
    swapped_ = true;
  } else {
    throw Error(ErrorCode::BadMagic, "not a pcap file (magic mismatch)");
  }
  const std::uint32_t network = u32(&hdr[20]);
  if (network != static_cast<std::uint32_t>(LinkType::Ieee80211) &&
      network != static_cast<std::uint32_t>(LinkType::Ieee80211Radiotap)) {
    throw Error(ErrorCode::UnsupportedLinkType,
                "unsupported pcap link type " + std::to_string(network));
  }
  link_type_ = static_cast<LinkType>(network);
}

std::uint32_t PcapReader::u32(const std::uint8_t* p) const {
  return swapped_ ? load_be32(p) : load_le32(p);
}

std::optional<CaptureRecord> PcapReader::next() {
  if (done_) return std::nullopt;

  std::array<std::uint8_t, kRecordHeaderSize> hdr{};
  std::size_t got = 0;
  if (!read_exact(in_, hdr.data(), hdr.size(), got)) {
    done_ = true;
    if (got != 0) error_ = Error(ErrorCode::TruncatedRecord, "truncated pcap record header");
    return std::nullopt;
  }
  const std::uint32_t ts_sec = u32(&hdr[0]);
  const std::uint32_t ts_usec = u32(&hdr[4]);
  const std::uint32_t incl_len = u32(&hdr[8]);
  if (incl_len > kMaxRecordSize) {
    done_ = true;
    error_ = Error(ErrorCode::TruncatedRecord,
                   "implausible captured length " + std::to_string(incl_len));
    return std::nullopt;
  }

  Bytes data(incl_len);
  if (!read_exact(in_, data.data(), data.size(), got)) {
    done_ = true;
    error_ = Error(ErrorCode::TruncatedRecord, "truncated pcap record body");
    return std::nullopt;
  }

  CaptureRecord rec;
  rec.ts = timestamp_from_seconds(ts_sec, ts_usec);
  if (link_type_ == LinkType::Ieee80211Radiotap) {
    try {
      rec.fcs_present = radiotap_reports_fcs(data);
      rec.frame = strip_radiotap(data);
    } catch (const Error& e) {
      done_ = true;
      error_ = e;
      return std::nullopt;
    }
  } else {
    rec.frame = std::move(data);
  }
  return rec;
}

PcapFileSource::PcapFileSource(const std::filesystem::path& path)
    : file_(path, std::ios::binary) {
  if (!file_) throw Error(ErrorCode::Io, "cannot open capture " + path.string());
  reader_ = std::make_unique<PcapReader>(file_);
}

PcapReadResult read_pcap(std::istream& in) {
  PcapReadResult result;
  try {
    PcapReader reader(in);
    while (auto rec = reader.next()) result.records.push_back(std::move(*rec));
    result.error = reader.error();
  } catch (const Error& e) {
    result.error = e;
  }
  return result;
}

PcapWriter::PcapWriter(std::ostream& out, LinkType link_type, std::uint32_t snaplen)
    : out_(out), snaplen_(snaplen) {
  std::array<std::uint8_t, kGlobalHeaderSize> hdr{};
  store_le32(&hdr[0], kMagicMicros);
  store_le16(&hdr[4], 2);
  store_le16(&hdr[6], 4);
  // thiszone and sigfigs stay zero
  store_le32(&hdr[16], snaplen_);
  store_le32(&hdr[20], static_cast<std::uint32_t>(link_type));
  out_.write(reinterpret_cast<const char*>(hdr.data()), hdr.size());
}

void PcapWriter::write(Timestamp ts, ByteView packet) {
  const std::int64_t us = micros_since_epoch(ts);
  if (us < 0) throw Error(ErrorCode::InvalidArgument, "pcap timestamps must be non-negative");
  const auto incl = static_cast<std::uint32_t>(std::min<std::size_t>(packet.size(), snaplen_));
  std::array<std::uint8_t, kRecordHeaderSize> hdr{};
  store_le32(&hdr[0], static_cast<std::uint32_t>(us / 1'000'000));
  store_le32(&hdr[4], static_cast<std::uint32_t>(us % 1'000'000));
  store_le32(&hdr[8], incl);
  store_le32(&hdr[12], static_cast<std::uint32_t>(packet.size()));
  out_.write(reinterpret_cast<const char*>(hdr.data()), hdr.size());
  out_.write(reinterpret_cast<const char*>(packet.data()), incl);
  ++count_;
}

}  // namespace sttk
