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

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "core/collector.hpp"
#include "core/detector.hpp"
#include "core/error.hpp"
#include "core/pcap.hpp"
#include "core/sensor.hpp"
#include "core/simulator.hpp"
#include "core/uplink.hpp"
#include "support/alert_reference.hpp"
#include "support/cli_runner.hpp"
#include "support/dissector_check.hpp"
#include "support/report_gen.hpp"
#include "support/test_support.hpp"

using namespace sttk;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Failure {
  std::string message;
};

void expect(bool cond, const std::string& message) {
  if (!cond) throw Failure{message};
}

const OuiRegistry& bundled_registry() {
  static const OuiRegistry reg = OuiRegistry::load_file(test::data_dir() / "oui_registry.tsv");
  return reg;
}

std::vector<CaptureRecord> records_of(const SimulationResult& sim) {
  const std::string bytes(sim.pcap.begin(), sim.pcap.end());
  std::istringstream in(bytes);
  auto r = read_pcap(in);
  if (r.error) throw Failure{std::string("pcap re-read failed: ") + r.error->what()};
  return std::move(r.records);
}

SimulationResult simulate_file(const char* name) {
  return generate(load_scenario((test::scenario_dir() / name).string()));
}

SensorSettings settings(std::int64_t window = 300, std::int64_t period = 300) {
  SensorSettings s;
  s.sensor_id = "accept";
  s.window = seconds(window);
  s.sample_period = seconds(period);
  s.salt = Salt{0xA5A5A5A5DEADBEEFull};
  return s;
}

CrowdingReport run_sensor(const std::vector<CaptureRecord>& records, const OuiRegistry& reg,
                          std::vector<CrowdingReport>* all = nullptr) {
  MemorySink sink;
  Sensor sensor(settings(), reg, sink);
  MemorySource src(records);
  sensor.run(src);
  if (all) *all = sensor.reports();
  return sensor.reports().back();
}

std::string breakdown(const CrowdingReport& r) {
  return std::to_string(r.total) + " = " + std::to_string(r.connected) + "/" +
         std::to_string(r.probes_real) + "/" + std::to_string(r.probes_virtual);
}

std::string write_sensor_config(const test::TempDir& dir, const std::string& extra = "") {
  const auto path = dir / "sensor.json";
  test::write_text(path, R"({"sensor_id": "accept", "salt": "A5A5A5A5DEADBEEF", "oui_registry": ")" +
                             (test::data_dir() / "oui_registry.tsv").string() + "\"" + extra + "}");
  return path.string();
}

std::vector<CrowdingReport> read_report_lines(const std::string& text) {
  std::vector<CrowdingReport> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(decode_json(line));
  }
  return out;
}

// ---- criteria -------------------------------------------------------------

Outcome exact_recovery() {
  test::TempDir dir;
  const auto cfg = write_sensor_config(dir);
  auto r = test::run_cli({"simulate", "--scenario", (test::scenario_dir() / "exact_recovery.json").string(),
                          "--out", (dir / "sim").string()});
  expect(r.code == 0, "simulate failed: " + r.err);
  const auto start = std::chrono::steady_clock::now();
  r = test::run_cli({"detect", "--pcap", (dir / "sim/trace.pcap").string(), "--config", cfg, "--out",
                     "stdout", "--quiet"});
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  expect(r.code == 0, "detect failed: " + r.err);
  const auto reports = read_report_lines(r.out);
  expect(!reports.empty(), "no reports");
  const auto& last = reports.back();
  expect(last.total == 50 && last.connected == 20 && last.probes_real == 30 &&
             last.probes_virtual == 0,
         "final window " + breakdown(last));
  expect(elapsed < 10.0, "detect took " + std::to_string(elapsed) + " s");
  char buf[64];
  std::snprintf(buf, sizeof buf, " in %.2f s", elapsed);
  return {true, "final window " + breakdown(last) + buf};
}

Outcome randomization_resistance() {
  const auto sim = simulate_file("randomized_distinct.json");
  const auto records = records_of(sim);
  std::set<MacAddress> sas;
  for (const auto& rec : records) {
    const auto f = parse_frame(rec.frame);
    if (f.kind == FrameKind::ProbeRequest) sas.insert(*f.source());
  }
  const auto last = run_sensor(records, bundled_registry());
  expect(last.probes_virtual == 50 && last.total == 50, "final window " + breakdown(last));
  expect(sas.size() >= 250, std::to_string(sas.size()) + " distinct SAs");
  return {true, "virtual = " + std::to_string(last.probes_virtual) + ", " + std::to_string(sas.size()) +
                    " distinct SAs"};
}

Outcome collapse() {
  const auto sim = simulate_file("template_collision.json");
  expect(sim.truth.devices.size() == 10, "scenario has " + std::to_string(sim.truth.devices.size()) + " devices");
  const auto last = run_sensor(records_of(sim), bundled_registry());
  expect(last.probes_virtual == 2 && last.total == 2, "final window " + breakdown(last));
  return {true, "10 devices, virtual = 2"};
}

Outcome varying_ie_rule() {
  const auto reg = test::small_registry();
  auto stream = [](const MacAddress& base, std::uint8_t rates, std::uint8_t channel, int n) {
    std::vector<CaptureRecord> out;
    for (int i = 0; i < n; ++i) {
      auto octets = base.octets();
      octets[5] = static_cast<std::uint8_t>(i);
      const MacAddress mac(octets);
      const std::vector<InformationElement> ies{
          {0, {}}, {1, {0x82, 0x84, rates}}, {3, {channel}}, {45, {0x2d, 0x01, 0x1b}}, {221, {0x00, 0x50, 0xf2, 0x08}}};
      out.push_back({timestamp_from_seconds(1700000000 + i * 7), serialize_frame(make_probe_request(mac, ies)), false});
    }
    return out;
  };
  const MacAddress a{{0x02, 0x11, 0x22, 0x33, 0x44, 0x00}};
  const MacAddress b{{0x06, 0xaa, 0xbb, 0xcc, 0xdd, 0x00}};
  auto merged = [](std::vector<CaptureRecord> x, const std::vector<CaptureRecord>& y) {
    x.insert(x.end(), y.begin(), y.end());
    std::stable_sort(x.begin(), x.end(), [](const auto& l, const auto& r) { return l.ts < r.ts; });
    return x;
  };
  const auto channel_only = run_sensor(merged(stream(a, 0x8b, 1, 20), stream(b, 0x8b, 11, 20)), reg);
  const auto rates_differ = run_sensor(merged(stream(a, 0x8b, 1, 20), stream(b, 0x96, 1, 20)), reg);
  expect(channel_only.probes_virtual == 1, "IE 3 difference gave " + std::to_string(channel_only.probes_virtual));
  expect(rates_differ.probes_virtual == 2, "IE 1 difference gave " + std::to_string(rates_differ.probes_virtual));
  return {true, "IE 3 differs -> 1 footprint, IE 1 differs -> 2 footprints"};
}

Outcome dedup() {
  const auto reg = test::small_registry();
  const auto dev = *MacAddress::parse("3c:07:54:aa:bb:cc");
  const auto ap = *MacAddress::parse("00:00:0c:00:00:01");
  std::vector<CaptureRecord> recs;
  for (int i = 0; i < 10; ++i) {
    const auto ts = timestamp_from_seconds(1700000000 + i * 20);
    recs.push_back({ts, serialize_frame(make_data_frame(ap, dev, ap, true, false)), false});
    recs.push_back({ts, serialize_frame(make_probe_request(dev, {{1, {0x82}}})), false});
  }
  const auto last = run_sensor(recs, reg);
  expect(last.total == 1 && last.connected == 1, "final window " + breakdown(last));
  return {true, "data + real probes from one MAC -> " + breakdown(last)};
}

Outcome window_boundaries() {
  const auto reg = test::small_registry();
  const std::int64_t window = 300;
  const std::int64_t t = 1700000000;
  const auto ap = *MacAddress::parse("00:00:0c:00:00:01");
  MemorySink sink;
  Sensor sensor(settings(window, 1), reg, sink);
  sensor.ingest({timestamp_from_seconds(t), serialize_frame(make_data_frame(ap, *MacAddress::parse("3c:07:54:00:00:01"), ap, true, false)), false});
  sensor.ingest({timestamp_from_seconds(t), serialize_frame(make_probe_request(*MacAddress::parse("00:03:93:00:00:02"), {{1, {0x82}}})), false});
  sensor.ingest({timestamp_from_seconds(t), serialize_frame(make_probe_request(*MacAddress::parse("da:00:00:00:00:03"), {{1, {0x0c}}})), false});
  // Non-mobile real probe: discarded, only moves the clock past the last boundary.
  sensor.ingest({timestamp_from_seconds(t + window + 2), serialize_frame(make_probe_request(*MacAddress::parse("00:12:f0:00:00:04"), {})), false});
  sensor.finish();
  std::map<std::int64_t, std::uint64_t> totals;
  for (const auto& r : sensor.reports()) totals[r.ts] = r.total;
  for (std::int64_t now = t; now < t + window; ++now) {
    expect(totals.count(now) && totals[now] == 3, "total at t+" + std::to_string(now - t));
  }
  expect(totals.at(t + window - 1) == 3, "t+window-1");
  expect(totals.at(t + window) == 0, "t+window");
  expect(totals.at(t + window + 1) == 0, "t+window+1");
  return {true, "counted on [t, t+300), gone at t+300 and t+301"};
}

Outcome codec_round_trips() {
  std::mt19937_64 rng(0x7e57);
  std::size_t saturated = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto r = test::random_report(rng);
    const auto payload = encode_lorawan(r);
    expect(payload[0] == kLorawanVersion, "version byte");
    const auto fields = decode_lorawan(payload);
    expect(fields == test::expected_lora_fields(r), "LoRaWAN fields for report " + std::to_string(i));
    expect(encode_lorawan(report_from_lorawan(fields, r.sensor_id, r.ts)) == payload,
           "LoRaWAN re-encode for report " + std::to_string(i));
    if (fields.total == 0xFFFF || fields.window_min == 0xFF || fields.connected == 0xFFFF ||
        fields.probes_real == 0xFFFF || fields.probes_virtual == 0xFFFF) {
      ++saturated;
    }
    expect(decode_json(encode_json(r)) == r, "JSON round trip for report " + std::to_string(i));
  }
  expect(saturated > 0, "no saturation cases generated");

  std::size_t frames = 0;
  for (const char* name : {"exact_recovery.json", "randomized_distinct.json", "template_collision.json",
                           "mixed_venue.json"}) {
    const auto sim = simulate_file(name);
    const auto records = records_of(sim);
    expect(records.size() == sim.truth.frames, std::string(name) + ": frame count");
    for (const auto& rec : records) {
      expect(serialize_frame(parse_frame(rec.frame)) == rec.frame, std::string(name) + ": frame bytes");
    }
    frames += records.size();
  }
  return {true, "1000 reports (" + std::to_string(saturated) + " saturating), " + std::to_string(frames) +
                    " simulated frames re-parsed"};
}

// Every MAC of the trace, searched as raw bytes, colon text and bare hex.
class MacScanner {
 public:
  void add(const MacAddress& m) { keys_.insert(key(m.octets().data())); }
  std::size_t size() const { return keys_.size(); }

  bool found_in(const std::string& text) const {
    const auto* p = reinterpret_cast<const std::uint8_t*>(text.data());
    for (std::size_t i = 0; i + 6 <= text.size(); ++i) {
      if (keys_.count(key(p + i))) return true;
    }
    for (std::size_t i = 0; i < text.size(); ++i) {
      std::uint8_t oct[6];
      if (hex_run(text, i, 1, oct) || hex_run(text, i, 0, oct)) {
        if (keys_.count(key(oct))) return true;
      }
    }
    return false;
  }

 private:
  static std::uint64_t key(const std::uint8_t* o) {
    std::uint64_t k = 0;
    for (int i = 0; i < 6; ++i) k = (k << 8) | o[i];
    return k;
  }
  static int nib(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }
  // Six hex octets starting at i, with `sep` separator characters between them.
  static bool hex_run(const std::string& s, std::size_t i, int sep, std::uint8_t* out) {
    const std::size_t need = 12 + 5 * static_cast<std::size_t>(sep);
    if (i + need > s.size()) return false;
    std::size_t pos = i;
    for (int o = 0; o < 6; ++o) {
      const int hi = nib(s[pos]), lo = nib(s[pos + 1]);
      if (hi < 0 || lo < 0) return false;
      out[o] = static_cast<std::uint8_t>(hi << 4 | lo);
      pos += 2;
      if (sep && o < 5) {
        if (s[pos] != ':' && s[pos] != '-') return false;
        ++pos;
      }
    }
    return true;
  }

  std::unordered_set<std::uint64_t> keys_;
};

Outcome privacy() {
  const auto sim = simulate_file("mixed_venue.json");
  const auto records = records_of(sim);
  expect(records.size() >= 100000, "only " + std::to_string(records.size()) + " frames");
  MacScanner scanner;
  for (const auto& rec : records) {
    const auto f = parse_frame(rec.frame);
    for (const auto* a : {&f.addr1, &f.addr2, &f.addr3, &f.addr4}) {
      if (*a) scanner.add(**a);
    }
  }

  const auto probe = records.front();
  const auto planted = *parse_frame(probe.frame).addr2;
  const std::string raw(planted.octets().begin(), planted.octets().end());
  std::string bare = planted.to_string();
  std::erase(bare, ':');
  expect(scanner.found_in("x" + raw + "y") && scanner.found_in("{\"m\":\"" + planted.to_string() + "\"}") &&
             scanner.found_in(bare),
         "scanner self-check");

  test::TempDir dir;
  std::size_t reports = 0;
  for (const auto transport : {Transport::JsonMqtt, Transport::Lorawan}) {
    auto s = settings(300, 60);
    s.transport = transport;
    s.journal = dir / ("journal-" + std::string(to_string(transport)) + ".ndjson");
    FileSink sink(dir / ("reports-" + std::string(to_string(transport)) + ".ndjson"));
    Sensor sensor(s, bundled_registry(), sink);
    MemorySource src(records);
    sensor.run(src);
    reports += sensor.reports().size();
  }
  {
    Collector collector(dir / "store");
    for (const auto transport : {Transport::JsonMqtt, Transport::Lorawan}) {
      std::ifstream in(dir / ("reports-" + std::string(to_string(transport)) + ".ndjson"));
      collector.ingest_ndjson(in, [] { return std::int64_t{1700009999}; });
    }
    expect(!collector.sensors().empty(), "collector stored nothing");
  }

  std::size_t files = 0, bytes = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir.path())) {
    if (!entry.is_regular_file()) continue;
    const auto text = test::read_text(entry.path());
    ++files;
    bytes += text.size();
    expect(!scanner.found_in(text), "MAC found in " + entry.path().filename().string());
  }
  expect(files >= 5, "expected journals, report streams and store files");
  return {true, std::to_string(records.size()) + " frames, " + std::to_string(scanner.size()) + " MACs, " +
                    std::to_string(files) + " files / " + std::to_string(bytes) + " bytes clean"};
}

Outcome alert_engine() {
  std::mt19937_64 rng(0xa1e47);
  std::size_t fired = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto s = test::random_series(rng);
    Collector collector;
    auto sink = std::make_shared<MemoryAlertSink>();
    AlertPolicy p;
    p.name = "p";
    p.threshold = s.threshold;
    p.consecutive = s.k;
    collector.add_policy(p, sink);
    for (std::size_t j = 0; j < s.totals.size(); ++j) {
      CrowdingReport r;
      r.sensor_id = "s";
      r.ts = 1000 + static_cast<std::int64_t>(j) * 60;
      r.window_s = 300;
      r.connected = s.totals[j];
      r.total = s.totals[j];
      collector.ingest_text(encode_json(r), 0);
    }
    std::vector<std::size_t> got;
    for (const auto& a : sink->alerts()) got.push_back(static_cast<std::size_t>((a.ts - 1000) / 60));
    const auto expected = test::reference_alert_indices(s.totals, s.threshold, s.k);
    expect(got == expected, "series " + std::to_string(i) + " differs from the reference");
    fired += got.size();
  }
  return {true, "10000 series, " + std::to_string(fired) + " alerts, all matching"};
}

Outcome end_to_end() {
  test::TempDir dir;
  const auto cfg = write_sensor_config(dir, R"(, "collector": {"store_dir": "store"})");
  auto r = test::run_cli({"simulate", "--scenario", (test::scenario_dir() / "mixed_venue.json").string(),
                          "--out", (dir / "sim").string()});
  expect(r.code == 0, "simulate: " + r.err);
  const auto reports_path = (dir / "reports.ndjson").string();
  r = test::run_cli({"detect", "--pcap", (dir / "sim/trace.pcap").string(), "--config", cfg,
                     "--sample-period", "60", "--out", reports_path, "--quiet"});
  expect(r.code == 0, "detect: " + r.err);
  r = test::run_cli({"collect", "--config", cfg, "--input", reports_path});
  expect(r.code == 0, "collect: " + r.err);
  r = test::run_cli({"export", "--config", cfg, "--sensor", "accept", "--from", "0", "--to", "9999999999",
                     "--format", "csv"});
  expect(r.code == 0, "export: " + r.err);

  const auto published = read_report_lines(test::read_text(reports_path));
  std::istringstream csv(r.out);
  std::string line;
  std::getline(csv, line);
  expect(line == "sensor_id,ts,window_s,connected,probes_real,probes_virtual,total", "CSV header " + line);
  std::size_t i = 0;
  while (std::getline(csv, line)) {
    expect(i < published.size(), "more CSV rows than reports");
    const auto& p = published[i];
    const std::string want = p.sensor_id + "," + std::to_string(p.ts) + "," + std::to_string(p.window_s) + "," +
                             std::to_string(p.connected) + "," + std::to_string(p.probes_real) + "," +
                             std::to_string(p.probes_virtual) + "," + std::to_string(p.total);
    expect(line == want, "row " + std::to_string(i) + ": " + line + " != " + want);
    ++i;
  }
  expect(i == published.size() && i > 10, std::to_string(i) + " rows for " + std::to_string(published.size()) + " reports");
  return {true, std::to_string(i) + " reports reproduced field for field"};
}

Outcome dissector() {
  const auto diff = test::compare_with_dissector();
  expect(diff.frames == 100 && diff.expected == 100, "frame counts " + std::to_string(diff.frames));
  if (!diff.mismatches.empty()) throw Failure{diff.mismatches.front()};
  return {true, "100 frames agree"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact recovery without randomization", exact_recovery},
      {"randomization resistance", randomization_resistance},
      {"fingerprint collapse", collapse},
      {"varying-IE rule", varying_ie_rule},
      {"connected/probe dedup", dedup},
      {"sliding-window boundaries", window_boundaries},
      {"codec round trips", codec_round_trips},
      {"privacy of stored artifacts", privacy},
      {"alert engine vs reference", alert_engine},
      {"end to end", end_to_end},
      {"dissector cross-check", dissector},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const Failure& f) {
      o = {false, f.message};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
              << o.detail << ")" << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
