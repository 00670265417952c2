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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_set>
#include <vector>

#include "core/detector.hpp"
#include "core/time.hpp"

namespace sttk {

struct IdentityRecord {
  IdentityKind kind;
  std::uint64_t id64;
  Timestamp last_seen;

  friend bool operator==(const IdentityRecord&, const IdentityRecord&) = default;
};

// Distinct identities per kind seen in one window.
struct WindowSnapshot {
  std::array<std::unordered_set<std::uint64_t>, kIdentityKindCount> ids;

  const std::unordered_set<std::uint64_t>& of(IdentityKind kind) const {
    return ids[static_cast<std::size_t>(kind)];
  }
  std::unordered_set<std::uint64_t>& of(IdentityKind kind) {
    return ids[static_cast<std::size_t>(kind)];
  }
};

// The sensor's anonymized local database: one last-seen timestamp per
// (kind, id64). A single writer feeds record(); snapshot() may be called from
// other threads and sees a consistent point-in-time view.
//
// With a journal path, every insert or refresh appends one NDJSON line
//   {"kind":"connected_ue","id64":"0123456789abcdef","last_seen":<unix micros>}
// and the journal is replayed when the store is constructed.
class WindowStore {
 public:
  WindowStore() = default;
  explicit WindowStore(const std::filesystem::path& journal);

  WindowStore(const WindowStore&) = delete;
  WindowStore& operator=(const WindowStore&) = delete;

  void record(const Observation& obs);

  // Identities with last_seen in the half-open interval (now - window, now].
  // Throws Error{InvalidArgument} unless window > 0.
  WindowSnapshot snapshot(Timestamp now, Duration window) const;

  // Drops records with last_seen <= now - retention. Returns how many went.
  std::size_t prune(Timestamp now, Duration retention);

  std::size_t size() const;
  std::optional<Timestamp> last_seen(IdentityKind kind, std::uint64_t id64) const;
  std::vector<IdentityRecord> records() const;

 private:
  using Key = std::pair<IdentityKind, std::uint64_t>;

  bool apply(const Key& key, Timestamp ts);
  void replay(const std::filesystem::path& journal);

  mutable std::shared_mutex mutex_;
  std::map<Key, Timestamp> records_;
  std::ofstream journal_;
};

}  // namespace sttk
