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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/frame.hpp"
#include "core/time.hpp"

namespace sttk {

enum class DeviceMode { AssociatedData, ProbingReal, ProbingRandomized };
enum class Randomization { PerBurst, PerProbe };

std::string_view to_string(DeviceMode mode);
std::string_view to_string(Randomization r);

struct DeviceProfile {
  std::uint32_t oui = 0x3C0754;
  bool mobile = true;
  DeviceMode mode = DeviceMode::ProbingReal;
  // IEs of every probe request, in order. A DS Parameter Set (id 3) entry has
  // its value replaced by the channel the device is currently probing.
  std::vector<InformationElement> ie_template;
  std::uint32_t burst_size = 1;
  double burst_interval_s = 10.0;
  Randomization randomization = Randomization::PerBurst;  // ProbingRandomized only
  double active_start_s = 0.0;                            // offsets from Scenario::start_ts
  std::optional<double> active_end_s;                     // defaults to duration_s
};

struct NoiseConfig {
  double beacon_interval_s = 0.0;  // 0 disables beacons
  std::uint32_t access_points = 1;
};

struct Scenario {
  double duration_s = 60.0;
  std::int64_t start_ts = 1'700'000'100;  // Unix seconds of the first instant
  std::uint64_t seed = 1;
  double drop_probability = 0.0;
  NoiseConfig noise;
  std::vector<DeviceProfile> devices;
};

// Standard probe-request template; different variants differ in the HT
// Capabilities and Extended Capabilities values, so they fingerprint apart.
std::vector<InformationElement> standard_ie_template(std::uint32_t variant);

// Parses the scenario JSON document. Device entries may carry "count" to
// expand into several devices, and "template_variant" (+"distinct_templates")
// instead of an explicit "ie_template". Throws Error{InvalidScenario}.
Scenario parse_scenario(std::string_view json);
Scenario load_scenario(const std::string& path);

// Throws Error{InvalidScenario}.
void validate(const Scenario& scenario);

struct DeviceTruth {
  DeviceMode mode = DeviceMode::ProbingReal;
  bool mobile = true;
  std::size_t template_group = 0;  // randomized devices with equal templates share a group
  std::vector<MacAddress> addresses;
  std::vector<Timestamp> emissions;  // every frame written to the trace, ascending
};

struct GroundTruth {
  std::vector<DeviceTruth> devices;
  std::vector<MacAddress> noise_addresses;
  std::size_t frames = 0;
  std::size_t noise_frames = 0;
  std::size_t dropped_frames = 0;
};

struct SimulationResult {
  Bytes pcap;  // link type 105
  GroundTruth truth;
};

// Deterministic: equal scenarios produce byte-identical output.
SimulationResult generate(const Scenario& scenario);

struct ExpectedCount {
  // Devices of each class that emitted in the window.
  std::uint64_t connected = 0;
  std::uint64_t probes_real = 0;     // mobile real-MAC probers only
  std::uint64_t probes_virtual = 0;  // randomizing devices
  std::uint64_t total = 0;
  // What fingerprinting can resolve: distinct templates among the emitting
  // randomizing devices.
  std::uint64_t virtual_templates = 0;
  std::uint64_t detector_total = 0;
};

// Counts over the half-open window (now - window, now].
ExpectedCount ground_truth_count(const GroundTruth& truth, Timestamp now, Duration window);

std::string ground_truth_json(const Scenario& scenario, const GroundTruth& truth);

}  // namespace sttk
