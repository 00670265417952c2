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
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/report.hpp"

namespace sttk {

// A stored collector sample. Same shape as the report that produced it.
using SeriesPoint = CrowdingReport;

struct AlertPolicy {
  static constexpr std::string_view kAnySensor = "*";

  std::string name;
  std::string sensor_id{kAnySensor};
  std::uint64_t threshold = 0;
  std::uint32_t consecutive = 1;  // K >= 1
  std::string sink = "stdout";    // "stdout" or an http:// webhook URL

  bool applies_to(std::string_view sensor) const {
    return sensor_id == kAnySensor || sensor_id == sensor;
  }
};

struct Alert {
  std::string policy;
  std::string sensor_id;
  std::int64_t ts = 0;
  std::uint64_t total = 0;

  friend bool operator==(const Alert&, const Alert&) = default;
};

// Fires when the run of samples with total >= threshold that ends at
// new_point is exactly `consecutive` long: the last K samples are all at or
// above the threshold and the sample before them is below it (or absent).
// `history` holds the earlier samples of the same sensor in time order.
std::optional<Alert> evaluate_alerts(const AlertPolicy& policy, const SeriesPoint& new_point,
                                     std::span<const SeriesPoint> history);

// {"policy":..,"sensor_id":..,"ts":..,"total":..}
std::string alert_json(const Alert& alert);

class AlertSink {
 public:
  virtual ~AlertSink() = default;
  virtual void send(const Alert& alert) = 0;
};

class StreamAlertSink final : public AlertSink {
 public:
  explicit StreamAlertSink(std::ostream& out) : out_(out) {}
  void send(const Alert& alert) override;

 private:
  std::mutex mutex_;
  std::ostream& out_;
};

// POSTs alert_json() to a plain-http URL. Throws Error{InvalidConfig} for a
// URL it cannot use and Error{SinkUnavailable} when the POST fails.
class WebhookAlertSink final : public AlertSink {
 public:
  explicit WebhookAlertSink(const std::string& url);
  void send(const Alert& alert) override;

 private:
  std::string base_;  // scheme://host[:port]
  std::string path_;
};

class MemoryAlertSink final : public AlertSink {
 public:
  void send(const Alert& alert) override;
  std::vector<Alert> alerts() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Alert> alerts_;
};

// Builds the sink named by AlertPolicy::sink.
std::shared_ptr<AlertSink> make_alert_sink(const std::string& spec, std::ostream& stdout_stream);

}  // namespace sttk
