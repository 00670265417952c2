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

#include <bitset>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "core/frame.hpp"
#include "core/oui_registry.hpp"
#include "core/time.hpp"

namespace sttk {

enum class IdentityKind : std::uint8_t { ConnectedUe = 0, RealProbeMobile = 1, VirtualFootprint = 2 };

inline constexpr std::size_t kIdentityKindCount = 3;

std::string_view to_string(IdentityKind kind);
std::optional<IdentityKind> parse_identity_kind(std::string_view text);

// One anonymized detection event. Never carries a plaintext MAC.
struct Observation {
  IdentityKind kind = IdentityKind::ConnectedUe;
  std::uint64_t id64 = 0;
  Timestamp ts;
  // Equal to id64 for the MAC-based kinds, empty for footprints.
  std::optional<std::uint64_t> raw_mac_hash;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Salt {
  std::uint64_t value = 0;
  friend constexpr bool operator==(Salt, Salt) = default;
};

// Which IEs feed the probe-request footprint. IEs outside `included` are not
// digested at all; IEs in `varying` contribute only their id and length bytes.
class FingerprintConfig {
 public:
  static const std::vector<std::uint8_t>& default_included();
  static const std::vector<std::uint8_t>& default_varying();

  FingerprintConfig();
  // Throws Error{InvalidConfig} unless varying is a subset of included.
  FingerprintConfig(std::vector<std::uint8_t> included, std::vector<std::uint8_t> varying);

  const std::vector<std::uint8_t>& included_ie_ids() const { return included_; }
  const std::vector<std::uint8_t>& varying_ie_ids() const { return varying_; }

  bool includes(std::uint8_t id) const { return included_mask_.test(id); }
  bool varies(std::uint8_t id) const { return varying_mask_.test(id); }

 private:
  std::vector<std::uint8_t> included_;
  std::vector<std::uint8_t> varying_;
  std::bitset<256> included_mask_;
  std::bitset<256> varying_mask_;
};

std::uint64_t fingerprint(const Frame& probe, const FingerprintConfig& cfg);

// FNV-1a 64 over the salt (8 bytes, big-endian) followed by the 6 octets.
std::uint64_t anonymize(const MacAddress& mac, Salt salt);

// Station address of a data frame, chosen from the DS bits. Returns nullopt
// for WDS / IBSS-style frames and for group addresses.
std::optional<MacAddress> locate_ue_mac(const Frame& data);

// The decision path a frame takes through the detector. Exactly one applies
// to every parsed frame.
enum class DetectorBranch {
  DroppedOther,
  DataNoStation,
  ConnectedUe,
  RealProbeDiscarded,
  RealProbeMobile,
  VirtualFootprint,
};

DetectorBranch select_branch(const Frame& frame, const OuiRegistry& registry);

std::optional<Observation> process_frame(const Frame& frame, Timestamp ts,
                                         const FingerprintConfig& cfg,
                                         const OuiRegistry& registry, Salt salt);

// Binds the per-sensor parameters of process_frame.
class Detector {
 public:
  Detector(FingerprintConfig cfg, const OuiRegistry& registry, Salt salt)
      : cfg_(std::move(cfg)), registry_(registry), salt_(salt) {}

  std::optional<Observation> process(const Frame& frame, Timestamp ts) const {
    return process_frame(frame, ts, cfg_, registry_, salt_);
  }

  const FingerprintConfig& config() const { return cfg_; }

 private:
  FingerprintConfig cfg_;
  const OuiRegistry& registry_;
  Salt salt_;
};

}  // namespace sttk
