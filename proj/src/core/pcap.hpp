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
#include <deque>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "core/error.hpp"
#include "core/frame.hpp"
#include "core/time.hpp"

namespace sttk {

enum class LinkType : std::uint32_t {
  Ethernet = 1,
  Ieee80211 = 105,
  Ieee80211Radiotap = 127,
};

struct CaptureRecord {
  Timestamp ts;
  Bytes frame;               // starts at the 802.11 MAC header
  bool fcs_present = false;  // frame still carries its 4-byte FCS
};

// Returns the packet suffix after the radiotap header. Throws
// Error{TruncatedRecord} if the packet is shorter than 4 bytes or than the
// header-declared length.
Bytes strip_radiotap(ByteView packet);

// True when the radiotap Flags field is present and announces a trailing FCS.
// Only the presence words and the optional TSFT field are walked.
bool radiotap_reports_fcs(ByteView packet);

// Pull-based frame source. The pcap reader is the production implementation;
// live monitor-mode capture would be another.
class CaptureSource {
 public:
  virtual ~CaptureSource() = default;
  virtual std::optional<CaptureRecord> next() = 0;
  // Set once next() has returned nullopt because of a malformed tail.
  virtual const std::optional<Error>& error() const = 0;
};

class MemorySource final : public CaptureSource {
 public:
  explicit MemorySource(std::vector<CaptureRecord> records);
  std::optional<CaptureRecord> next() override;
  const std::optional<Error>& error() const override { return error_; }

 private:
  std::deque<CaptureRecord> records_;
  std::optional<Error> error_;
};

// Streaming reader for classic pcap (not pcapng). The constructor validates
// the global header and throws Error{BadMagic | UnsupportedLinkType |
// TruncatedRecord}.
class PcapReader final : public CaptureSource {
 public:
  explicit PcapReader(std::istream& in);

  std::optional<CaptureRecord> next() override;
  const std::optional<Error>& error() const override { return error_; }

  LinkType link_type() const { return link_type_; }
  bool swapped() const { return swapped_; }

 private:
  std::uint32_t u32(const std::uint8_t* p) const;

  std::istream& in_;
  bool swapped_ = false;
  LinkType link_type_ = LinkType::Ieee80211;
  std::optional<Error> error_;
  bool done_ = false;
};

// Owns the file stream backing a PcapReader.
class PcapFileSource final : public CaptureSource {
 public:
  explicit PcapFileSource(const std::filesystem::path& path);

  std::optional<CaptureRecord> next() override { return reader_->next(); }
  const std::optional<Error>& error() const override { return reader_->error(); }

 private:
  std::ifstream file_;
  std::unique_ptr<PcapReader> reader_;
};

struct PcapReadResult {
  std::vector<CaptureRecord> records;
  std::optional<Error> error;  // partial results are kept when set
};

PcapReadResult read_pcap(std::istream& in);

// Writes native little-endian microsecond pcap.
class PcapWriter {
 public:
  PcapWriter(std::ostream& out, LinkType link_type, std::uint32_t snaplen = 65535);
  void write(Timestamp ts, ByteView packet);
  std::size_t records_written() const { return count_; }

 private:
  std::ostream& out_;
  std::uint32_t snaplen_;
  std::size_t count_ = 0;
};

}  // namespace sttk
