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

#include "core/window_store.hpp"

#include <cinttypes>
#include <cstdio>
#include <string>

#include "json.hpp"

#include "core/error.hpp"

namespace sttk {

namespace {

std::string journal_line(IdentityKind kind, std::uint64_t id64, Timestamp ts) {
  char id_hex[17];
  std::snprintf(id_hex, sizeof id_hex, "%016" PRIx64, id64);
  std::string line = R"({"kind":")";
  line += to_string(kind);
  line += R"(","id64":")";
  line += id_hex;
  line += R"(","last_seen":)";
  line += std::to_string(micros_since_epoch(ts));
  line += "}\n";
  return line;
}

}  // namespace

WindowStore::WindowStore(const std::filesystem::path& journal) {
  if (std::filesystem::exists(journal)) replay(journal);
  journal_.open(journal, std::ios::app);
  if (!journal_) throw Error(ErrorCode::Io, "cannot open journal " + journal.string());
}

void WindowStore::replay(const std::filesystem::path& journal) {
  std::ifstream in(journal);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // A torn final line after a crash is expected; skip anything unparsable.
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    const auto kind = parse_identity_kind(j.value("kind", ""));
    const std::string id_hex = j.value("id64", "");
    if (!kind || id_hex.size() != 16 || !j.contains("last_seen") ||
        !j["last_seen"].is_number_integer()) {
      continue;
    }
    std::uint64_t id = 0;
    try {
      id = std::stoull(id_hex, nullptr, 16);
    } catch (const std::exception&) {
      continue;
    }
    apply({*kind, id}, Timestamp{Duration{j["last_seen"].get<std::int64_t>()}});
  }
}

bool WindowStore::apply(const Key& key, Timestamp ts) {
  auto [it, inserted] = records_.try_emplace(key, ts);
  if (inserted) return true;
  if (ts > it->second) {
    it->second = ts;
    return true;
  }
  return false;
}

void WindowStore::record(const Observation& obs) {
  std::unique_lock lock(mutex_);
  if (apply({obs.kind, obs.id64}, obs.ts) && journal_.is_open()) {
    journal_ << journal_line(obs.kind, obs.id64, obs.ts);
    journal_.flush();
  }
}

WindowSnapshot WindowStore::snapshot(Timestamp now, Duration window) const {
  if (window <= Duration::zero()) {
    throw Error(ErrorCode::InvalidArgument, "window must be positive");
  }
  const Timestamp lower = now - window;
  WindowSnapshot snap;
  std::shared_lock lock(mutex_);
  for (const auto& [key, last_seen] : records_) {
    if (last_seen > lower && last_seen <= now) snap.of(key.first).insert(key.second);
  }
  return snap;
}

std::size_t WindowStore::prune(Timestamp now, Duration retention) {
  const Timestamp horizon = now - retention;
  std::unique_lock lock(mutex_);
  return std::erase_if(records_, [&](const auto& kv) { return kv.second <= horizon; });
}

std::size_t WindowStore::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

std::optional<Timestamp> WindowStore::last_seen(IdentityKind kind, std::uint64_t id64) const {
  std::shared_lock lock(mutex_);
  const auto it = records_.find({kind, id64});
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<IdentityRecord> WindowStore::records() const {
  std::shared_lock lock(mutex_);
  std::vector<IdentityRecord> out;
  out.reserve(records_.size());
  for (const auto& [key, ts] : records_) out.push_back({key.first, key.second, ts});
  return out;
}

}  // namespace sttk
