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

#include <random>
#include <set>

#include "core/detector.hpp"
#include "core/error.hpp"
#include "core/fnv.hpp"
#include "support/test_support.hpp"

using namespace sttk;

namespace {

MacAddress mac(const char* s) { return *MacAddress::parse(s); }

const Timestamp kT0 = timestamp_from_seconds(1700000000);

Bytes text_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

Frame probe(const MacAddress& sa, std::vector<InformationElement> ies) {
  return make_probe_request(sa, std::move(ies), 1);
}

}  // namespace

TEST_CASE("fnv-1a 64 reference values") {
  CHECK(fnv1a64({}) == 0xcbf29ce484222325ull);
  CHECK(fnv1a64(text_bytes("a")) == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64(text_bytes("foobar")) == 0x85944171f73967e8ull);
}

TEST_CASE("anonymize pinned values") {
  CHECK(anonymize(mac("00:00:00:00:00:00"), Salt{0}) == 0x8df352d4f9fa3addull);
  const auto m = mac("3c:07:54:12:34:56");
  const auto a = anonymize(m, Salt{0x0123456789ABCDEFull});
  const auto b = anonymize(m, Salt{0xFEDCBA9876543210ull});
  CHECK(a == 0x2ba2b7241735e390ull);
  CHECK(b == 0xda3b8113c9484840ull);
  CHECK(a != b);
  CHECK(anonymize(m, Salt{0x0123456789ABCDEFull}) == a);
}

TEST_CASE("fingerprint pinned values and rules") {
  const FingerprintConfig cfg;
  const auto sa = mac("02:00:00:00:00:01");

  CHECK(fingerprint(probe(sa, {}), cfg) == 0xcbf29ce484222325ull);
  CHECK(fingerprint(probe(sa, {{0, text_bytes("ssid")}, {200, {1, 2}}}), cfg) ==
        0xcbf29ce484222325ull);
  CHECK(fingerprint(probe(sa, {{1, {0x82, 0x84}}}), cfg) == 0xc02a787752d50334ull);

  SUBCASE("IE 3 value is ignored, its length is not") {
    const auto a = fingerprint(probe(sa, {{1, {0x82}}, {3, {0x01}}}), cfg);
    const auto b = fingerprint(probe(sa, {{1, {0x82}}, {3, {0x0b}}}), cfg);
    const auto c = fingerprint(probe(sa, {{1, {0x82}}, {3, {0x01, 0x00}}}), cfg);
    CHECK(a == b);
    CHECK(a != c);
  }
  SUBCASE("IE 1 value matters") {
    const auto a = fingerprint(probe(sa, {{1, {0x82, 0x84}}}), cfg);
    const auto b = fingerprint(probe(sa, {{1, {0x82, 0x8b}}}), cfg);
    CHECK(a != b);
  }
  SUBCASE("IE order and duplicates matter") {
    const auto a = fingerprint(probe(sa, {{1, {0x82}}, {50, {0x30}}}), cfg);
    const auto b = fingerprint(probe(sa, {{50, {0x30}}, {1, {0x82}}}), cfg);
    const auto c = fingerprint(probe(sa, {{1, {0x82}}, {1, {0x82}}, {50, {0x30}}}), cfg);
    CHECK(a != b);
    CHECK(a != c);
  }
  SUBCASE("SSID and other unlisted IEs are not digested") {
    const auto a = fingerprint(probe(sa, {{0, text_bytes("home")}, {1, {0x82}}}), cfg);
    const auto b = fingerprint(probe(sa, {{0, text_bytes("cafe-wifi")}, {1, {0x82}}}), cfg);
    CHECK(a == b);
  }
  SUBCASE("digest matches a hand-built buffer") {
    const auto f = probe(sa, {{1, {0x82, 0x84}}, {3, {0x06}}, {45, {0xaa, 0xbb, 0xcc}}, {7, {1}}});
    const Bytes buffer{1, 2, 0x82, 0x84, 3, 1, 45, 3, 0xaa, 0xbb, 0xcc};
    CHECK(fingerprint(f, cfg) == fnv1a64(buffer));
  }
}

TEST_CASE("fingerprint config validation") {
  CHECK(FingerprintConfig::default_included() ==
        std::vector<std::uint8_t>{1, 50, 3, 45, 191, 127, 70, 107, 221});
  CHECK(FingerprintConfig::default_varying() == std::vector<std::uint8_t>{3});
  CHECK_THROWS_AS(FingerprintConfig({1, 50}, {3}), Error);
  const FingerprintConfig wider({1, 3, 221}, {3, 221});
  CHECK(wider.varies(221));
  CHECK_FALSE(wider.includes(50));
}

TEST_CASE("locate_ue_mac follows the DS bits") {
  const auto a1 = mac("3c:07:54:00:00:01");
  const auto a2 = mac("3c:07:54:00:00:02");
  const auto a3 = mac("00:00:0c:00:00:03");
  CHECK(locate_ue_mac(make_data_frame(a1, a2, a3, true, false)) == a2);
  CHECK(locate_ue_mac(make_data_frame(a1, a2, a3, false, true)) == a1);
  CHECK_FALSE(locate_ue_mac(make_data_frame(a1, a2, a3, false, false)));
  CHECK_FALSE(locate_ue_mac(make_data_frame(a1, a2, a3, true, true)));
  CHECK_FALSE(locate_ue_mac(make_data_frame(MacAddress::broadcast(), a2, a3, false, true)));
  CHECK_FALSE(locate_ue_mac(make_data_frame(a1, mac("01:00:5e:00:00:01"), a3, true, false)));
}

TEST_CASE("process_frame outcomes") {
  const auto reg = test::small_registry();
  const FingerprintConfig cfg;
  const Salt salt{0x0123456789ABCDEFull};

  SUBCASE("data frame to the DS gives a connected UE") {
    const auto m = mac("3c:07:54:12:34:56");
    const auto f = make_data_frame(mac("00:00:0c:00:00:01"), m, mac("00:00:0c:00:00:02"), true, false);
    const auto obs = process_frame(f, kT0, cfg, reg, salt);
    REQUIRE(obs);
    CHECK(obs->kind == IdentityKind::ConnectedUe);
    CHECK(obs->id64 == 0x2ba2b7241735e390ull);
    CHECK(obs->raw_mac_hash == obs->id64);
    CHECK(obs->ts == kT0);
  }
  SUBCASE("data frame MACs are not OUI filtered") {
    const auto f = make_data_frame(mac("00:00:0c:00:00:01"), mac("aa:00:00:00:00:01"),
                                   mac("00:00:0c:00:00:02"), true, false);
    CHECK(select_branch(f, reg) == DetectorBranch::ConnectedUe);
  }
  SUBCASE("randomized probe gives a footprint") {
    const auto f = probe(mac("02:00:00:00:00:01"), {{1, {0x82, 0x84}}});
    const auto obs = process_frame(f, kT0, cfg, reg, salt);
    REQUIRE(obs);
    CHECK(obs->kind == IdentityKind::VirtualFootprint);
    CHECK(obs->id64 == 0xc02a787752d50334ull);
    CHECK_FALSE(obs->raw_mac_hash);
  }
  SUBCASE("real probe from a mobile vendor") {
    const auto m = mac("00:03:93:00:00:07");
    const auto obs = process_frame(probe(m, {}), kT0, cfg, reg, salt);
    REQUIRE(obs);
    CHECK(obs->kind == IdentityKind::RealProbeMobile);
    CHECK(obs->id64 == anonymize(m, salt));
  }
  SUBCASE("real probe from an unknown or non-mobile vendor is discarded") {
    CHECK_FALSE(process_frame(probe(mac("a8:00:00:00:00:01"), {}), kT0, cfg, reg, salt));
    CHECK_FALSE(process_frame(probe(mac("00:12:f0:00:00:01"), {}), kT0, cfg, reg, salt));
  }
  SUBCASE("beacon is dropped") {
    const auto f = make_beacon(mac("00:00:0c:00:00:01"), {0, 0});
    CHECK(select_branch(f, reg) == DetectorBranch::DroppedOther);
    CHECK_FALSE(process_frame(f, kT0, cfg, reg, salt));
  }
}

TEST_CASE("identity kind names round-trip") {
  for (auto k : {IdentityKind::ConnectedUe, IdentityKind::RealProbeMobile,
                 IdentityKind::VirtualFootprint}) {
    CHECK(parse_identity_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_identity_kind("nope"));
}

// Reference branch table written directly from the decision rules, without
// going through the detector's helpers.
static DetectorBranch reference_branch(const Bytes& raw, const OuiRegistry& reg) {
  const std::uint8_t type = (raw[0] >> 2) & 3;
  const std::uint8_t subtype = raw[0] >> 4;
  const bool to_ds = raw[1] & 1;
  const bool from_ds = raw[1] & 2;
  if (type == 0 && subtype == 4) {
    const std::uint8_t o0 = raw[10];
    if (o0 & 0x02) return DetectorBranch::VirtualFootprint;
    const std::uint32_t prefix = (std::uint32_t{raw[10]} << 16) | (raw[11] << 8) | raw[12];
    const auto* e = reg.find(prefix);
    return e && e->is_mobile ? DetectorBranch::RealProbeMobile : DetectorBranch::RealProbeDiscarded;
  }
  if (type == 2) {
    int offset = -1;
    if (to_ds && !from_ds) offset = 10;
    if (!to_ds && from_ds) offset = 4;
    if (offset < 0 || (raw[static_cast<std::size_t>(offset)] & 1)) return DetectorBranch::DataNoStation;
    return DetectorBranch::ConnectedUe;
  }
  return DetectorBranch::DroppedOther;
}

TEST_CASE("property: every small frame takes exactly the reference branch") {
  const auto reg = test::small_registry();
  const FingerprintConfig cfg;
  const Salt salt{42};
  const std::vector<MacAddress> addrs{
      mac("3c:07:54:00:00:01"),  // mobile
      mac("00:12:f0:00:00:02"),  // known, not mobile
      mac("a8:00:00:00:00:03"),  // unknown
      mac("02:00:00:00:00:04"),  // locally administered
      mac("01:00:5e:00:00:05"),  // group
      MacAddress::broadcast(),
  };
  std::array<std::size_t, 6> hits{};
  for (unsigned fc0 = 0; fc0 < 256; ++fc0) {
    for (unsigned fc1 : {0x00u, 0x01u, 0x02u, 0x03u, 0x08u, 0x40u, 0x41u, 0x42u}) {
      for (const auto& a1 : addrs) {
        for (const auto& a2 : addrs) {
          Bytes raw(40, 0x00);
          raw[0] = static_cast<std::uint8_t>(fc0);
          raw[1] = static_cast<std::uint8_t>(fc1);
          std::copy(a1.octets().begin(), a1.octets().end(), raw.begin() + 4);
          std::copy(a2.octets().begin(), a2.octets().end(), raw.begin() + 10);
          const auto frame = parse_frame(raw);
          const auto branch = select_branch(frame, reg);
          REQUIRE(branch == reference_branch(raw, reg));
          hits[static_cast<std::size_t>(branch)]++;

          const auto obs = process_frame(frame, kT0, cfg, reg, salt);
          switch (branch) {
            case DetectorBranch::ConnectedUe:
              REQUIRE((obs && obs->kind == IdentityKind::ConnectedUe));
              break;
            case DetectorBranch::RealProbeMobile:
              REQUIRE((obs && obs->kind == IdentityKind::RealProbeMobile));
              break;
            case DetectorBranch::VirtualFootprint:
              REQUIRE((obs && obs->kind == IdentityKind::VirtualFootprint));
              break;
            default:
              REQUIRE_FALSE(obs);
          }
        }
      }
    }
  }
  for (auto h : hits) CHECK(h > 0);
}

TEST_CASE("property: footprint is stable across randomized source addresses") {
  const FingerprintConfig cfg;
  std::mt19937_64 rng(5);
  const std::vector<InformationElement> tmpl{
      {1, {0x02, 0x04, 0x0b, 0x16}}, {50, {0x0c, 0x12}}, {45, {0x2d, 0x01, 0x1b}}, {221, {0, 0x50, 0xf2, 8}}};
  std::set<std::uint64_t> fps;
  for (int i = 0; i < 500; ++i) {
    MacAddress::Octets o{};
    for (auto& b : o) b = static_cast<std::uint8_t>(rng());
    o[0] = static_cast<std::uint8_t>((o[0] | 0x02) & 0xfe);
    auto ies = tmpl;
    ies.insert(ies.begin() + 2, InformationElement{3, {static_cast<std::uint8_t>(1 + i % 13)}});
    fps.insert(fingerprint(probe(MacAddress{o}, ies), cfg));
  }
  CHECK(fps.size() == 1);
}

TEST_CASE("property: anonymized ids never leak MAC bytes") {
  const auto reg = test::small_registry();
  const FingerprintConfig cfg;
  std::mt19937_64 rng(17);
  for (int i = 0; i < 5000; ++i) {
    MacAddress::Octets o{};
    for (auto& b : o) b = static_cast<std::uint8_t>(rng());
    o[0] &= 0xfc;
    if (i % 2) { o[0] = 0x3c; o[1] = 0x07; o[2] = 0x54; }
    const MacAddress m{o};
    const auto f = make_data_frame(mac("00:00:0c:00:00:01"), m, mac("00:00:0c:00:00:02"), true, false);
    const auto obs = process_frame(f, kT0, cfg, reg, Salt{rng()});
    REQUIRE(obs);
    std::string raw(8, '\0');
    for (int k = 0; k < 8; ++k) raw[static_cast<std::size_t>(k)] = static_cast<char>(obs->id64 >> (56 - 8 * k));
    REQUIRE_FALSE(test::contains_bytes(raw, m));
  }
}
