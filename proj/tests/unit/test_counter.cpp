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

#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "core/counter.hpp"

using namespace sttk;

namespace {

const Timestamp kNow = timestamp_from_seconds(1700000400);

WindowSnapshot make(std::initializer_list<std::uint64_t> c, std::initializer_list<std::uint64_t> r,
                    std::initializer_list<std::uint64_t> v) {
  WindowSnapshot s;
  s.of(IdentityKind::ConnectedUe).insert(c.begin(), c.end());
  s.of(IdentityKind::RealProbeMobile).insert(r.begin(), r.end());
  s.of(IdentityKind::VirtualFootprint).insert(v.begin(), v.end());
  return s;
}

}  // namespace

TEST_CASE("disjoint sets sum") {
  const auto r = count_window(make({1, 2, 3}, {4, 5}, {6, 7, 8, 9}), "s1", kNow, seconds(300));
  CHECK(r.connected == 3);
  CHECK(r.probes_real == 2);
  CHECK(r.probes_virtual == 4);
  CHECK(r.total == 9);
  CHECK(r.sensor_id == "s1");
  CHECK(r.ts == 1700000400);
  CHECK(r.window_s == 300);
  CHECK(r.consistent());
}

TEST_CASE("a MAC seen both connected and probing counts once") {
  const auto r = count_window(make({0x11}, {0x11}, {0xF1}), "s", kNow, seconds(300));
  CHECK(r.connected == 1);
  CHECK(r.probes_real == 0);
  CHECK(r.probes_virtual == 1);
  CHECK(r.total == 2);
}

TEST_CASE("footprints are never merged with MAC ids") {
  const auto r = count_window(make({0x11}, {}, {0x11}), "s", kNow, seconds(300));
  CHECK(r.total == 2);
}

TEST_CASE("empty window") {
  const auto r = count_window(WindowSnapshot{}, "s", kNow, seconds(60));
  CHECK(r.total == 0);
  CHECK(r.window_s == 60);
}

TEST_CASE("property: permutation invariance and monotonicity") {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 500; ++round) {
    std::vector<std::pair<IdentityKind, std::uint64_t>> items;
    const int n = static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) items.emplace_back(static_cast<IdentityKind>(rng() % 3), rng() % 25);

    auto build = [](const auto& xs) {
      WindowSnapshot s;
      for (const auto& [k, id] : xs) s.of(k).insert(id);
      return s;
    };
    const auto base = count_window(build(items), "s", kNow, seconds(300));
    REQUIRE(base.consistent());

    auto shuffled = items;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    REQUIRE(count_window(build(shuffled), "s", kNow, seconds(300)) == base);

    // Brute-force reference of the three classes.
    std::set<std::uint64_t> c, rl, v;
    for (const auto& [k, id] : items) {
      if (k == IdentityKind::ConnectedUe) c.insert(id);
      if (k == IdentityKind::RealProbeMobile) rl.insert(id);
      if (k == IdentityKind::VirtualFootprint) v.insert(id);
    }
    std::size_t real_only = 0;
    for (auto id : rl) real_only += c.count(id) ? 0 : 1;
    REQUIRE(base.total == c.size() + real_only + v.size());

    auto grown = items;
    grown.emplace_back(static_cast<IdentityKind>(rng() % 3), rng() % 30);
    REQUIRE(count_window(build(grown), "s", kNow, seconds(300)).total >= base.total);
  }
}
