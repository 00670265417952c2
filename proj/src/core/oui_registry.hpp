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
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/mac_address.hpp"

namespace sttk {

struct OuiEntry {
  std::string vendor;
  bool is_mobile = false;
};

// Map from 24-bit OUI to vendor. Immutable once loaded and safe to share.
//
// File format, one entry per line:
//   XX:XX:XX<TAB>vendor<TAB>0|1
// Blank lines and lines starting with '#' are ignored. Any other line that
// does not parse, or repeats a prefix already seen, is counted in
// skipped_lines().
class OuiRegistry {
 public:
  OuiRegistry() = default;

  // Throws Error{EmptyRegistry} when no line is valid.
  static OuiRegistry load(std::istream& in);
  static OuiRegistry load_file(const std::filesystem::path& path);

  // Returns false if the prefix is already present.
  bool insert(std::uint32_t prefix, OuiEntry entry);

  const OuiEntry* find(std::uint32_t prefix) const;
  std::size_t size() const { return entries_.size(); }
  std::size_t skipped_lines() const { return skipped_; }

  // Writes the registry file format, prefixes ascending.
  void save(std::ostream& out) const;

 private:
  std::unordered_map<std::uint32_t, OuiEntry> entries_;
  std::size_t skipped_ = 0;
};

bool classify_mobile_oui(const MacAddress& mac, const OuiRegistry& registry);

struct ManufImportStats {
  std::size_t prefixes = 0;
  std::size_t mobile = 0;
  std::size_t ignored_blocks = 0;  // /28 and /36 assignments
};

// Builds a registry snapshot from a Wireshark "manuf" file. A prefix is marked
// mobile when its long (or short) vendor name contains one of the
// case-insensitive allowlist patterns.
OuiRegistry import_manuf(std::istream& manuf, const std::vector<std::string>& mobile_allowlist,
                         ManufImportStats* stats = nullptr);

// One pattern per line; '#' comments and blank lines ignored.
std::vector<std::string> load_allowlist(std::istream& in);

}  // namespace sttk
