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

#include "core/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "core/error.hpp"
#include "core/hex.hpp"
#include "core/pcap.hpp"

namespace sttk {

namespace {

constexpr std::uint8_t kIeSsid = 0;
constexpr std::uint8_t kIeDsParameterSet = 3;
constexpr std::uint32_t kInfrastructureOui = 0x00000C;
constexpr std::int64_t kInterFrameMicros = 20'000;
constexpr std::int64_t kInterFrameJitterMicros = 5'000;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidScenario, what);
}

// Raw engine output only: std distributions are not specified bit-for-bit
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

class AddressPool {
 public:
  explicit AddressPool(Rng& rng) : rng_(rng) {}

  MacAddress vendor(std::uint32_t oui) {
    while (true) {
      const std::uint64_t r = rng_.next();
      MacAddress mac{{static_cast<std::uint8_t>(oui >> 16), static_cast<std::uint8_t>(oui >> 8),
                      static_cast<std::uint8_t>(oui), static_cast<std::uint8_t>(r),
                      static_cast<std::uint8_t>(r >> 8), static_cast<std::uint8_t>(r >> 16)}};
      if (used_.insert(mac).second) return mac;
    }
  }

  // Locally administered, unicast.
  MacAddress randomized() {
    while (true) {
      const std::uint64_t r = rng_.next();
      MacAddress::Octets o{};
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = static_cast<std::uint8_t>(r >> (8 * i));
      o[0] = static_cast<std::uint8_t>((o[0] | 0x02) & ~0x01);
      MacAddress mac{o};
      if (used_.insert(mac).second) return mac;
    }
  }

 private:
  Rng& rng_;
  std::unordered_set<MacAddress> used_;
};

struct Emitted {
  std::int64_t micros;
  std::size_t order;
  Bytes frame;
};

std::int64_t to_micros(double seconds) { return std::llround(seconds * 1e6); }

Bytes beacon_body(std::uint64_t tsf, std::uint8_t channel, std::uint32_t ap_index) {
  Bytes b;
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(tsf >> (8 * i)));
  b.insert(b.end(), {0x64, 0x00, 0x11, 0x04});  // 102.4 ms interval, ESS+privacy
  const std::string ssid = "sttk-ap-" + std::to_string(ap_index);
  b.push_back(kIeSsid);
  b.push_back(static_cast<std::uint8_t>(ssid.size()));
  b.insert(b.end(), ssid.begin(), ssid.end());
  b.insert(b.end(), {0x01, 0x08, 0x82, 0x84, 0x8b, 0x96, 0x0c, 0x12, 0x18, 0x24});
  b.insert(b.end(), {kIeDsParameterSet, 0x01, channel});
  return b;
}

std::vector<InformationElement> probe_ies(const std::vector<InformationElement>& tmpl,
                                          std::uint8_t channel) {
  std::vector<InformationElement> ies = tmpl;
  for (auto& ie : ies) {
    if (ie.id == kIeDsParameterSet) ie.value = {channel};
  }
  return ies;
}

DeviceMode parse_mode(const std::string& s) {
  if (s == "associated_data") return DeviceMode::AssociatedData;
  if (s == "probing_real") return DeviceMode::ProbingReal;
  if (s == "probing_randomized") return DeviceMode::ProbingRandomized;
  invalid("unknown device mode '" + s + "'");
}

Randomization parse_randomization(const std::string& s) {
  if (s == "per_burst") return Randomization::PerBurst;
  if (s == "per_probe") return Randomization::PerProbe;
  invalid("unknown randomization '" + s + "'");
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    invalid(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string_view to_string(DeviceMode mode) {
  switch (mode) {
    case DeviceMode::AssociatedData: return "associated_data";
    case DeviceMode::ProbingReal: return "probing_real";
    case DeviceMode::ProbingRandomized: return "probing_randomized";
  }
  return "unknown";
}

std::string_view to_string(Randomization r) {
  return r == Randomization::PerBurst ? "per_burst" : "per_probe";
}

std::vector<InformationElement> standard_ie_template(std::uint32_t variant) {
  const auto lo = static_cast<std::uint8_t>(variant);
  const auto hi = static_cast<std::uint8_t>(variant >> 8);
  const auto top = static_cast<std::uint8_t>(variant >> 16);
  std::vector<InformationElement> ies;
  ies.push_back({kIeSsid, {}});
  ies.push_back({1, {0x02, 0x04, 0x0b, 0x16, 0x0c, 0x12, 0x18, 0x24}});
  ies.push_back({kIeDsParameterSet, {0x01}});
  ies.push_back({50, {0x30, 0x48, 0x60, 0x6c}});
  Bytes ht(26, 0);
  ht[0] = 0x2d;
  ht[1] = 0x01;
  ht[2] = 0x1b;
  ht[3] = 0xff;
  ht[4] = 0xff;
  ht[24] = hi;
  ht[25] = lo;
  ies.push_back({45, std::move(ht)});
  ies.push_back({127, {lo, hi, top, 0x00, 0x00, 0x00, 0x00, 0x40}});
  ies.push_back({221, {0x00, 0x50, 0xf2, 0x08, 0x00, 0x10, 0x00}});
  return ies;
}

void validate(const Scenario& s) {
  if (!(s.duration_s > 0)) invalid("duration_s must be positive");
  if (s.start_ts < 0) invalid("start_ts must be non-negative");
  if (!(s.drop_probability >= 0.0 && s.drop_probability < 1.0)) {
    invalid("drop_probability must be in [0, 1)");
  }
  if (s.noise.beacon_interval_s < 0) invalid("noise.beacon_interval_s must be >= 0");
  if (s.noise.beacon_interval_s > 0 && s.noise.access_points == 0) {
    invalid("noise.access_points must be >= 1 when beacons are enabled");
  }
  for (std::size_t i = 0; i < s.devices.size(); ++i) {
    const auto& d = s.devices[i];
    const std::string where = "device " + std::to_string(i) + ": ";
    if (d.burst_size == 0) invalid(where + "burst_size must be >= 1");
    if (!(d.burst_interval_s > 0)) invalid(where + "burst_interval_s must be positive");
    if (to_micros(d.burst_interval_s) < 1) invalid(where + "burst_interval_s below 1 us");
    if (d.active_start_s < 0) invalid(where + "active start must be >= 0");
    if (d.active_end_s && *d.active_end_s < d.active_start_s) {
      invalid(where + "active end precedes start");
    }
    if (d.oui > 0xFFFFFF) invalid(where + "oui must be 24 bits");
    if (d.mode != DeviceMode::ProbingRandomized && (d.oui & 0x030000) != 0) {
      invalid(where + "vendor OUI must be globally administered and unicast");
    }
    if (d.mode != DeviceMode::AssociatedData && d.ie_template.empty()) {
      invalid(where + "probing devices need an IE template");
    }
  }
}

Scenario parse_scenario(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) invalid("scenario is not a JSON object");

  Scenario s;
  s.duration_s = get_or<double>(j, "duration_s", s.duration_s);
  s.start_ts = get_or<std::int64_t>(j, "start_ts", s.start_ts);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  s.drop_probability = get_or<double>(j, "drop_probability", 0.0);
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    if (!n.is_object()) invalid("noise must be an object");
    s.noise.beacon_interval_s = get_or<double>(n, "beacon_interval_s", 0.0);
    s.noise.access_points = get_or<std::uint32_t>(n, "access_points", 1);
  }
  if (!j.contains("devices") || !j["devices"].is_array()) invalid("devices must be an array");

  for (const auto& d : j["devices"]) {
    if (!d.is_object()) invalid("device entries must be objects");
    DeviceProfile p;
    p.mode = parse_mode(get_or<std::string>(d, "mode", "probing_real"));
    if (d.contains("oui")) {
      const auto oui = parse_oui(get_or<std::string>(d, "oui", ""));
      if (!oui) invalid("bad oui '" + d["oui"].dump() + "'");
      p.oui = *oui;
    }
    p.mobile = get_or<bool>(d, "mobile", true);
    p.burst_size = get_or<std::uint32_t>(d, "burst_size", p.burst_size);
    p.burst_interval_s = get_or<double>(d, "burst_interval_s", p.burst_interval_s);
    p.randomization = parse_randomization(get_or<std::string>(d, "randomization", "per_burst"));
    if (d.contains("active")) {
      const auto& a = d["active"];
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
        invalid("active must be [start_s, end_s]");
      }
      p.active_start_s = a[0].get<double>();
      p.active_end_s = a[1].get<double>();
    }

    const auto count = get_or<std::uint32_t>(d, "count", 1);
    const auto variant = get_or<std::uint32_t>(d, "template_variant", 0);
    const bool distinct = get_or<bool>(d, "distinct_templates", false);
    std::optional<std::vector<InformationElement>> explicit_template;
    if (d.contains("ie_template")) {
      if (!d["ie_template"].is_array()) invalid("ie_template must be an array");
      std::vector<InformationElement> ies;
      for (const auto& ie : d["ie_template"]) {
        const auto id = get_or<int>(ie, "id", -1);
        if (id < 0 || id > 255) invalid("IE id out of range");
        const auto value = from_hex(get_or<std::string>(ie, "value", ""));
        if (!value || value->size() > 255) invalid("IE value must be hex, at most 255 bytes");
        ies.push_back({static_cast<std::uint8_t>(id), *value});
      }
      explicit_template = std::move(ies);
    }
    for (std::uint32_t k = 0; k < count; ++k) {
      DeviceProfile copy = p;
      copy.ie_template =
          explicit_template ? *explicit_template : standard_ie_template(variant + (distinct ? k : 0));
      s.devices.push_back(std::move(copy));
    }
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open scenario " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

SimulationResult generate(const Scenario& scenario) {
  validate(scenario);
  Rng rng(scenario.seed);
  AddressPool pool(rng);
  SimulationResult result;
  GroundTruth& truth = result.truth;
  std::vector<Emitted> out;
  std::size_t order = 0;

  const std::int64_t start = scenario.start_ts * 1'000'000;
  const std::int64_t stop = start + to_micros(scenario.duration_s);

  const auto keep = [&]() {
    if (scenario.drop_probability > 0 && rng.unit() < scenario.drop_probability) {
      ++truth.dropped_frames;
      return false;
    }
    return true;
  };

  std::vector<MacAddress> aps;
  for (std::uint32_t a = 0; a < std::max<std::uint32_t>(scenario.noise.access_points, 1); ++a) {
    aps.push_back(pool.vendor(kInfrastructureOui));
  }
  const MacAddress gateway = pool.vendor(kInfrastructureOui);

  std::vector<std::vector<InformationElement>> templates;
  for (const auto& dev : scenario.devices) {
    DeviceTruth dt;
    dt.mode = dev.mode;
    dt.mobile = dev.mode == DeviceMode::ProbingRandomized || dev.mobile;
    const auto found = std::find(templates.begin(), templates.end(), dev.ie_template);
    dt.template_group = static_cast<std::size_t>(found - templates.begin());
    if (found == templates.end()) templates.push_back(dev.ie_template);

    const std::int64_t interval = to_micros(dev.burst_interval_s);
    const std::int64_t begin = start + to_micros(dev.active_start_s);
    const std::int64_t end =
        std::min(stop, start + to_micros(dev.active_end_s.value_or(scenario.duration_s)));
    // Keep whole bursts inside each interval so the burst count is exact.
    const std::int64_t span = static_cast<std::int64_t>(dev.burst_size - 1) *
                              (kInterFrameMicros + kInterFrameJitterMicros);
    const std::int64_t phase =
        static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(std::max<std::int64_t>(interval - span, 1))));
    std::uint16_t seq = static_cast<std::uint16_t>(rng.below(4096));
    std::uint8_t channel = static_cast<std::uint8_t>(1 + rng.below(11));
    const MacAddress& bssid = aps[rng.below(aps.size())];

    MacAddress mac = dev.mode == DeviceMode::ProbingRandomized ? MacAddress{} : pool.vendor(dev.oui);

    for (std::int64_t t = begin + phase; t < end; t += interval) {
      if (dev.mode == DeviceMode::ProbingRandomized && dev.randomization == Randomization::PerBurst) {
        mac = pool.randomized();
      }
      std::int64_t ft = t;
      for (std::uint32_t j = 0; j < dev.burst_size; ++j) {
        if (j > 0) {
          ft += kInterFrameMicros + static_cast<std::int64_t>(rng.below(kInterFrameJitterMicros));
        }
        if (ft >= end) break;
        if (dev.mode == DeviceMode::ProbingRandomized &&
            dev.randomization == Randomization::PerProbe) {
          mac = pool.randomized();
        }
        Frame f;
        if (dev.mode == DeviceMode::AssociatedData) {
          Bytes payload{0xaa, 0xaa, 0x03, 0x00, 0x00, 0x00, 0x08, 0x00};
          for (int b = 0; b < 20; ++b) payload.push_back(static_cast<std::uint8_t>(rng.next()));
          f = make_data_frame(bssid, mac, gateway, true, false, seq, std::move(payload));
        } else {
          f = make_probe_request(mac, probe_ies(dev.ie_template, channel), seq);
          channel = static_cast<std::uint8_t>(channel % 13 + 1);
        }
        seq = static_cast<std::uint16_t>((seq + 1) & 0x0fff);
        if (!keep()) continue;
        out.push_back({ft, order++, serialize_frame(f)});
        dt.emissions.push_back(Timestamp{Duration{ft}});
        if (dt.addresses.empty() || dt.addresses.back() != mac) dt.addresses.push_back(mac);
      }
    }
    std::sort(dt.emissions.begin(), dt.emissions.end());
    truth.devices.push_back(std::move(dt));
  }

  if (scenario.noise.beacon_interval_s > 0) {
    const std::int64_t interval = std::max<std::int64_t>(to_micros(scenario.noise.beacon_interval_s), 1);
    for (std::size_t a = 0; a < aps.size(); ++a) {
      truth.noise_addresses.push_back(aps[a]);
      const auto channel = static_cast<std::uint8_t>(1 + 5 * (a % 3));
      std::uint16_t seq = static_cast<std::uint16_t>(rng.below(4096));
      for (std::int64_t t = start + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(interval)));
           t < stop; t += interval) {
        Frame f = make_beacon(aps[a], beacon_body(static_cast<std::uint64_t>(t - start), channel,
                                                   static_cast<std::uint32_t>(a)),
                              seq);
        seq = static_cast<std::uint16_t>((seq + 1) & 0x0fff);
        if (!keep()) continue;
        out.push_back({t, order++, serialize_frame(f)});
        ++truth.noise_frames;
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const Emitted& a, const Emitted& b) {
    return a.micros != b.micros ? a.micros < b.micros : a.order < b.order;
  });

  std::ostringstream pcap(std::ios::binary);
  PcapWriter writer(pcap, LinkType::Ieee80211);
  for (const auto& e : out) writer.write(Timestamp{Duration{e.micros}}, e.frame);
  truth.frames = out.size();
  const std::string bytes = pcap.str();
  result.pcap.assign(bytes.begin(), bytes.end());
  return result;
}

ExpectedCount ground_truth_count(const GroundTruth& truth, Timestamp now, Duration window) {
  ExpectedCount c;
  const Timestamp lower = now - window;
  std::unordered_set<std::size_t> groups;
  for (const auto& d : truth.devices) {
    const auto it = std::upper_bound(d.emissions.begin(), d.emissions.end(), lower);
    if (it == d.emissions.end() || *it > now) continue;
    switch (d.mode) {
      case DeviceMode::AssociatedData:
        ++c.connected;
        break;
      case DeviceMode::ProbingReal:
        if (d.mobile) ++c.probes_real;
        break;
      case DeviceMode::ProbingRandomized:
        ++c.probes_virtual;
        groups.insert(d.template_group);
        break;
    }
  }
  c.total = c.connected + c.probes_real + c.probes_virtual;
  c.virtual_templates = groups.size();
  c.detector_total = c.connected + c.probes_real + c.virtual_templates;
  return c;
}

std::string ground_truth_json(const Scenario& scenario, const GroundTruth& truth) {
  nlohmann::ordered_json j;
  j["seed"] = scenario.seed;
  j["start_ts"] = scenario.start_ts;
  j["duration_s"] = scenario.duration_s;
  j["frames"] = truth.frames;
  j["noise_frames"] = truth.noise_frames;
  j["dropped_frames"] = truth.dropped_frames;
  auto devices = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < truth.devices.size(); ++i) {
    const auto& d = truth.devices[i];
    nlohmann::ordered_json dj;
    dj["index"] = i;
    dj["mode"] = to_string(d.mode);
    dj["mobile"] = d.mobile;
    dj["template_group"] = d.template_group;
    dj["distinct_addresses"] = d.addresses.size();
    auto em = nlohmann::ordered_json::array();
    for (auto ts : d.emissions) em.push_back(micros_since_epoch(ts));
    dj["emissions_us"] = std::move(em);
    devices.push_back(std::move(dj));
  }
  j["devices"] = std::move(devices);
  return j.dump(1);
}

}  // namespace sttk
