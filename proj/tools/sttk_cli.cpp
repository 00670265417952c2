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

// sttk command-line front end. Everything goes through the C API.

#include <csignal>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sttk/sttk.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;  // bad flags or unreadable input

int report_failure(const char* what, sttk_status status) {
  std::cerr << "sttk: " << what << ": " << sttk_status_name(status);
  const std::string detail = sttk_last_error();
  if (!detail.empty()) std::cerr << ": " << detail;
  std::cerr << '\n';
  return status == STTK_E_IO ? kExitUsage : kExitFailure;
}

const char* opt_cstr(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

struct Owned {
  char* p = nullptr;
  ~Owned() { sttk_free(p); }
};

// --- init -------------------------------------------------------------

struct InitArgs {
  std::string config;
  std::string sensor_id;
  bool force = false;
};

int run_init(const InitArgs& a) {
  Owned path;
  if (auto st = sttk_config_resolve(opt_cstr(a.config), &path.p); st != STTK_OK) {
    return report_failure("init", st);
  }
  if (auto st = sttk_config_init(path.p, opt_cstr(a.sensor_id), a.force ? 1 : 0); st != STTK_OK) {
    return report_failure("init", st);
  }
  std::cerr << "wrote " << path.p << '\n';
  return kExitOk;
}

// --- detect -----------------------------------------------------------

struct DetectArgs {
  std::string pcap;
  std::string config;
  std::string out;
  std::string sensor_id;
  std::int64_t window_s = 0;
  std::int64_t sample_period_s = 0;
  std::string transport;
  bool quiet = false;
};

int run_detect(const DetectArgs& a) {
  sttk_sensor_overrides ov{opt_cstr(a.sensor_id), a.window_s, a.sample_period_s,
                           opt_cstr(a.transport)};
  sttk_sensor* sensor = nullptr;
  if (auto st = sttk_sensor_open(opt_cstr(a.config), opt_cstr(a.out), &ov, &sensor); st != STTK_OK) {
    return report_failure("detect", st);
  }
  const auto st = sttk_sensor_run_pcap(sensor, a.pcap.c_str());
  sttk_sensor_stats stats{};
  sttk_sensor_stats_get(sensor, &stats);
  const int code = st == STTK_OK ? kExitOk : report_failure("detect", st);
  if (!a.quiet) {
    std::cerr << "frames=" << stats.frames << " malformed=" << stats.malformed_frames
              << " observations=" << stats.observations << " reports=" << stats.reports
              << " delivered=" << stats.reports_delivered << " dropped=" << stats.reports_dropped
              << '\n';
  }
  sttk_sensor_free(sensor);
  return code;
}

// --- simulate ---------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  sttk_simulation_stats stats{};
  if (auto st = sttk_simulate(a.scenario.c_str(), a.out.c_str(), &stats); st != STTK_OK) {
    return report_failure("simulate", st);
  }
  std::cerr << "devices=" << stats.devices << " frames=" << stats.frames
            << " noise_frames=" << stats.noise_frames << " dropped=" << stats.dropped_frames
            << " addresses=" << stats.distinct_addresses << '\n';
  return kExitOk;
}

// --- collect ----------------------------------------------------------

sttk_collector* g_running_collector = nullptr;

extern "C" void on_stop_signal(int) { sttk_collector_stop(g_running_collector); }

struct CollectArgs {
  std::string config;
  std::string store;
  std::vector<std::string> inputs;
  double duration_s = 0;
};

int run_collect(const CollectArgs& a) {
  sttk_collector* c = nullptr;
  if (auto st = sttk_collector_open_config(opt_cstr(a.config), opt_cstr(a.store), &c);
      st != STTK_OK) {
    return report_failure("collect", st);
  }
  sttk_status st = STTK_OK;
  if (!a.inputs.empty()) {
    for (const auto& in : a.inputs) {
      st = sttk_collector_ingest_file(c, in.c_str());
      if (st != STTK_OK) break;
    }
  } else {
    g_running_collector = c;
    std::signal(SIGINT, on_stop_signal);
    std::signal(SIGTERM, on_stop_signal);
    st = sttk_collector_run(c, a.duration_s);
    std::signal(SIGINT, SIG_DFL);
    std::signal(SIGTERM, SIG_DFL);
    g_running_collector = nullptr;
  }
  const int code = st == STTK_OK ? kExitOk : report_failure("collect", st);
  sttk_collector_stats s{};
  sttk_collector_stats_get(c, &s);
  std::cerr << "lines=" << s.lines_read << " stored=" << s.ingested
            << " duplicates=" << s.duplicates << " rejected=" << s.lines_rejected
            << " decode_errors=" << s.decode_errors
            << " invariant_violations=" << s.invariant_violations
            << " alerts=" << s.alerts_fired << '\n';
  sttk_collector_free(c);
  return code;
}

// --- export -----------------------------------------------------------

struct ExportArgs {
  std::string config;
  std::string store;
  std::string sensor;
  std::int64_t from = 0;
  std::int64_t to = 0;
  std::string format = "csv";
  std::string output;
};

int run_export(const ExportArgs& a) {
  sttk_collector* c = nullptr;
  if (auto st = sttk_collector_open_config(opt_cstr(a.config), opt_cstr(a.store), &c);
      st != STTK_OK) {
    return report_failure("export", st);
  }
  Owned text;
  const auto st =
      sttk_collector_export(c, a.sensor.c_str(), a.from, a.to, a.format.c_str(), &text.p);
  sttk_collector_free(c);
  if (st != STTK_OK) return report_failure("export", st);

  if (a.output.empty() || a.output == "-") {
    std::cout << text.p;
    std::cout.flush();
    return kExitOk;
  }
  std::ofstream out(a.output, std::ios::trunc);
  out << text.p;
  if (!out.flush()) {
    std::cerr << "sttk: export: cannot write " << a.output << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

// --- oui-build --------------------------------------------------------

struct OuiBuildArgs {
  std::string manuf;
  std::string out;
  std::string allowlist;
};

int run_oui_build(const OuiBuildArgs& a) {
  sttk_registry_build_stats stats{};
  if (auto st = sttk_registry_build(a.manuf.c_str(), opt_cstr(a.allowlist), a.out.c_str(), &stats);
      st != STTK_OK) {
    return report_failure("oui-build", st);
  }
  std::cerr << "prefixes=" << stats.entries << " mobile=" << stats.mobile
            << " ignored_blocks=" << stats.ignored_blocks << '\n';
  return kExitOk;
}

// --- oui-lookup -------------------------------------------------------

struct OuiLookupArgs {
  std::string registry;
  std::vector<std::string> macs;
};

int run_oui_lookup(const OuiLookupArgs& a) {
  sttk_registry* reg = nullptr;
  if (auto st = sttk_registry_load(a.registry.c_str(), &reg); st != STTK_OK) {
    return report_failure("oui-lookup", st);
  }
  int code = kExitOk;
  for (const auto& mac : a.macs) {
    int mobile = 0;
    Owned vendor;
    if (auto st = sttk_registry_lookup(reg, mac.c_str(), &mobile, &vendor.p); st != STTK_OK) {
      code = report_failure("oui-lookup", st);
      continue;
    }
    std::cout << mac << '\t' << (vendor.p ? vendor.p : "-") << '\t' << (mobile ? "mobile" : "other")
              << '\n';
  }
  sttk_registry_free(reg);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Passive Wi-Fi crowd counting"};
  app.set_version_flag("--version", sttk_version());
  app.require_subcommand(1);

  InitArgs init;
  auto* init_cmd = app.add_subcommand("init", "Write a sensor config with a fresh salt");
  init_cmd->add_option("--config", init.config, "Config path (default: $STTK_CONFIG)");
  init_cmd->add_option("--sensor-id", init.sensor_id, "Sensor id to record");
  init_cmd->add_flag("--force", init.force, "Overwrite an existing file");

  DetectArgs detect;
  auto* detect_cmd = app.add_subcommand("detect", "Replay a pcap and emit crowding reports");
  detect_cmd->add_option("--pcap", detect.pcap, "Capture file")->required();
  detect_cmd->add_option("--config", detect.config, "Config path (default: $STTK_CONFIG)");
  detect_cmd->add_option("--out", detect.out,
                         "'stdout' or an NDJSON file path (default: the configured sink)");
  detect_cmd->add_option("--sensor-id", detect.sensor_id, "Override sensor_id");
  detect_cmd->add_option("--window", detect.window_s, "Override window_s")->check(CLI::PositiveNumber);
  detect_cmd->add_option("--sample-period", detect.sample_period_s, "Override sample_period_s")
      ->check(CLI::PositiveNumber);
  detect_cmd->add_option("--transport", detect.transport, "Override transport")
      ->check(CLI::IsMember({"json_mqtt", "json", "lorawan"}));
  detect_cmd->add_flag("--quiet", detect.quiet, "No summary on stderr");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic trace and its ground truth");
  sim_cmd->add_option("--scenario", sim.scenario, "Scenario JSON")->required();
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();
  std::string ignored_config;
  sim_cmd->add_option("--config", ignored_config, "Accepted for uniformity; unused");

  CollectArgs collect;
  auto* collect_cmd = app.add_subcommand("collect", "Ingest reports into the collector store");
  collect_cmd->add_option("--config", collect.config, "Config path (default: $STTK_CONFIG)");
  collect_cmd->add_option("--store", collect.store, "Override collector.store_dir");
  collect_cmd->add_option("--input", collect.inputs,
                          "NDJSON file(s) to ingest instead of the configured sources ('-' = stdin)");
  collect_cmd->add_option("--duration", collect.duration_s,
                          "Stop MQTT sources after this many seconds (default: until signalled)");

  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export", "Export a sensor's series");
  export_cmd->add_option("--config", exp.config, "Config path (default: $STTK_CONFIG)");
  export_cmd->add_option("--store", exp.store, "Override collector.store_dir");
  export_cmd->add_option("--sensor", exp.sensor, "Sensor id")->required();
  export_cmd->add_option("--from", exp.from, "First Unix second (inclusive)")->required();
  export_cmd->add_option("--to", exp.to, "Last Unix second (inclusive)")->required();
  export_cmd->add_option("--format", exp.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  export_cmd->add_option("--output", exp.output, "Output file (default: stdout)");

  OuiBuildArgs oui;
  auto* oui_cmd = app.add_subcommand("oui-build", "Build an OUI registry snapshot from a manuf file");
  oui_cmd->add_option("--manuf", oui.manuf, "Wireshark manuf file")->required();
  oui_cmd->add_option("--out", oui.out, "Registry TSV to write")->required();
  oui_cmd->add_option("--allowlist", oui.allowlist, "Mobile vendor patterns (default: bundled)");
  oui_cmd->add_option("--config", ignored_config, "Accepted for uniformity; unused");

  OuiLookupArgs lookup;
  auto* lookup_cmd = app.add_subcommand("oui-lookup", "Classify MAC addresses");
  lookup_cmd->add_option("--registry", lookup.registry, "Registry TSV")->required();
  lookup_cmd->add_option("mac", lookup.macs, "MAC addresses")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*init_cmd) return run_init(init);
  if (*detect_cmd) return run_detect(detect);
  if (*sim_cmd) return run_simulate(sim);
  if (*collect_cmd) return run_collect(collect);
  if (*export_cmd) return run_export(exp);
  if (*oui_cmd) return run_oui_build(oui);
  if (*lookup_cmd) return run_oui_lookup(lookup);
  return kExitUsage;
}
