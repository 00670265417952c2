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

#include "core/oui_registry.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string_view>

#include "core/error.hpp"

namespace sttk {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool skippable(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

OuiRegistry OuiRegistry::load(std::istream& in) {
  OuiRegistry reg;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skippable(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      ++reg.skipped_;
      continue;
    }
    const auto prefix = parse_oui(trim(fields[0]));
    const auto vendor = trim(fields[1]);
    const auto flag = trim(fields[2]);
    if (!prefix || vendor.empty() || (flag != "0" && flag != "1")) {
      ++reg.skipped_;
      continue;
    }
    if (!reg.insert(*prefix, OuiEntry{std::string(vendor), flag == "1"})) ++reg.skipped_;
  }
  if (reg.entries_.empty()) {
    throw Error(ErrorCode::EmptyRegistry, "OUI registry has no valid entries");
  }
  return reg;
}

OuiRegistry OuiRegistry::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open OUI registry " + path.string());
  return load(in);
}

bool OuiRegistry::insert(std::uint32_t prefix, OuiEntry entry) {
  return entries_.emplace(prefix & 0xFFFFFF, std::move(entry)).second;
}

const OuiEntry* OuiRegistry::find(std::uint32_t prefix) const {
  const auto it = entries_.find(prefix);
  return it == entries_.end() ? nullptr : &it->second;
}

void OuiRegistry::save(std::ostream& out) const {
  std::vector<std::uint32_t> keys;
  keys.reserve(entries_.size());
  for (const auto& [k, v] : entries_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (auto k : keys) {
    const auto& e = entries_.at(k);
    out << format_oui(k) << '\t' << e.vendor << '\t' << (e.is_mobile ? '1' : '0') << '\n';
  }
}

bool classify_mobile_oui(const MacAddress& mac, const OuiRegistry& registry) {
  const OuiEntry* e = registry.find(mac.oui());
  return e != nullptr && e->is_mobile;
}

std::vector<std::string> load_allowlist(std::istream& in) {
  std::vector<std::string> patterns;
  std::string line;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    patterns.push_back(lowercase(trim(line)));
  }
  return patterns;
}

OuiRegistry import_manuf(std::istream& manuf, const std::vector<std::string>& mobile_allowlist,
                         ManufImportStats* stats) {
  std::vector<std::string> patterns;
  for (const auto& p : mobile_allowlist) patterns.push_back(lowercase(p));

  OuiRegistry reg;
  ManufImportStats local;
  std::string line;
  while (std::getline(manuf, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skippable(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 2) continue;
    const auto key = trim(fields[0]);
    if (key.find('/') != std::string_view::npos) {
      ++local.ignored_blocks;
      continue;
    }
    const auto prefix = parse_oui(key);
    if (!prefix) continue;

    const std::string short_name(trim(fields[1]));
    const std::string long_name = fields.size() >= 3 ? std::string(trim(fields[2])) : short_name;
    if (long_name.empty()) continue;

    const std::string haystack = lowercase(long_name) + '\n' + lowercase(short_name);
    const bool mobile = std::any_of(patterns.begin(), patterns.end(), [&](const std::string& p) {
      return haystack.find(p) != std::string::npos;
    });
    // Vendor names never contain tabs in the registry format.
    std::string vendor = long_name;
    std::replace(vendor.begin(), vendor.end(), '\t', ' ');
    if (reg.insert(*prefix, OuiEntry{std::move(vendor), mobile})) {
      ++local.prefixes;
      if (mobile) ++local.mobile;
    }
  }
  if (stats) *stats = local;
  return reg;
}

}  // namespace sttk
