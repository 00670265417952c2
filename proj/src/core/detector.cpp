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

#include "core/detector.hpp"

#include "core/error.hpp"
#include "core/fnv.hpp"

namespace sttk {

std::string_view to_string(IdentityKind kind) {
  switch (kind) {
    case IdentityKind::ConnectedUe: return "connected_ue";
    case IdentityKind::RealProbeMobile: return "real_probe_mobile";
    case IdentityKind::VirtualFootprint: return "virtual_footprint";
  }
  return "unknown";
}

std::optional<IdentityKind> parse_identity_kind(std::string_view text) {
  for (auto k : {IdentityKind::ConnectedUe, IdentityKind::RealProbeMobile,
                 IdentityKind::VirtualFootprint}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

// Supported Rates, Extended Supported Rates, DS Parameter Set, HT, VHT,
// Extended Capabilities, RM Enabled Capabilities, Interworking, Vendor Specific.
const std::vector<std::uint8_t>& FingerprintConfig::default_included() {
  static const std::vector<std::uint8_t> ids{1, 50, 3, 45, 191, 127, 70, 107, 221};
  return ids;
}

const std::vector<std::uint8_t>& FingerprintConfig::default_varying() {
  static const std::vector<std::uint8_t> ids{3};
  return ids;
}

FingerprintConfig::FingerprintConfig()
    : FingerprintConfig(default_included(), default_varying()) {}

FingerprintConfig::FingerprintConfig(std::vector<std::uint8_t> included,
                                     std::vector<std::uint8_t> varying)
    : included_(std::move(included)), varying_(std::move(varying)) {
  for (auto id : included_) included_mask_.set(id);
  for (auto id : varying_) {
    if (!included_mask_.test(id)) {
      throw Error(ErrorCode::InvalidConfig,
                  "varying IE " + std::to_string(id) + " is not in the included set");
    }
    varying_mask_.set(id);
  }
}

std::uint64_t fingerprint(const Frame& probe, const FingerprintConfig& cfg) {
  Fnv1a64 h;
  for (const auto& ie : probe.ies) {
    if (!cfg.includes(ie.id)) continue;
    h.update(ie.id);
    h.update(ie.length());
    if (!cfg.varies(ie.id)) h.update(ie.value);
  }
  return h.value();
}

std::uint64_t anonymize(const MacAddress& mac, Salt salt) {
  Fnv1a64 h;
  for (int shift = 56; shift >= 0; shift -= 8) {
    h.update(static_cast<std::uint8_t>(salt.value >> shift));
  }
  h.update(mac.octets());
  return h.value();
}

std::optional<MacAddress> locate_ue_mac(const Frame& data) {
  const bool to_ds = data.fc.to_ds();
  const bool from_ds = data.fc.from_ds();
  std::optional<MacAddress> station;
  if (to_ds && !from_ds) {
    station = data.addr2;
  } else if (!to_ds && from_ds) {
    station = data.addr1;
  }
  if (!station || station->group()) return std::nullopt;
  return station;
}

DetectorBranch select_branch(const Frame& frame, const OuiRegistry& registry) {
  switch (frame.kind) {
    case FrameKind::Other:
      return DetectorBranch::DroppedOther;
    case FrameKind::Data:
      return locate_ue_mac(frame) ? DetectorBranch::ConnectedUe : DetectorBranch::DataNoStation;
    case FrameKind::ProbeRequest: {
      const MacAddress& sa = frame.source().value();
      if (is_locally_administered(sa)) return DetectorBranch::VirtualFootprint;
      return classify_mobile_oui(sa, registry) ? DetectorBranch::RealProbeMobile
                                               : DetectorBranch::RealProbeDiscarded;
    }
  }
  return DetectorBranch::DroppedOther;
}

std::optional<Observation> process_frame(const Frame& frame, Timestamp ts,
                                         const FingerprintConfig& cfg,
                                         const OuiRegistry& registry, Salt salt) {
  switch (select_branch(frame, registry)) {
    case DetectorBranch::DroppedOther:
    case DetectorBranch::DataNoStation:
    case DetectorBranch::RealProbeDiscarded:
      return std::nullopt;
    case DetectorBranch::ConnectedUe: {
      const std::uint64_t id = anonymize(*locate_ue_mac(frame), salt);
      return Observation{IdentityKind::ConnectedUe, id, ts, id};
    }
    case DetectorBranch::RealProbeMobile: {
      const std::uint64_t id = anonymize(*frame.source(), salt);
      return Observation{IdentityKind::RealProbeMobile, id, ts, id};
    }
    case DetectorBranch::VirtualFootprint:
      return Observation{IdentityKind::VirtualFootprint, fingerprint(frame, cfg), ts, std::nullopt};
  }
  return std::nullopt;
}

}  // namespace sttk
