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

#include "core/alerts.hpp"

#include "httplib.h"
#include "json.hpp"

#include "core/error.hpp"

namespace sttk {

std::optional<Alert> evaluate_alerts(const AlertPolicy& policy, const SeriesPoint& new_point,
                                     std::span<const SeriesPoint> history) {
  const std::uint32_t k = std::max<std::uint32_t>(policy.consecutive, 1);
  if (new_point.total < policy.threshold) return std::nullopt;

  // Length of the at-or-above run ending at new_point, capped at k + 1.
  std::uint32_t run = 1;
  for (auto it = history.rbegin(); it != history.rend() && run <= k; ++it) {
    if (it->total < policy.threshold) break;
    ++run;
  }
  if (run != k) return std::nullopt;
  return Alert{policy.name, new_point.sensor_id, new_point.ts, new_point.total};
}

std::string alert_json(const Alert& alert) {
  nlohmann::ordered_json j;
  j["policy"] = alert.policy;
  j["sensor_id"] = alert.sensor_id;
  j["ts"] = alert.ts;
  j["total"] = alert.total;
  return j.dump();
}

void StreamAlertSink::send(const Alert& alert) {
  std::lock_guard lock(mutex_);
  out_ << alert_json(alert) << '\n';
  out_.flush();
}

WebhookAlertSink::WebhookAlertSink(const std::string& url) {
  constexpr std::string_view kScheme = "http://";
  if (url.rfind(kScheme, 0) != 0) {
    throw Error(ErrorCode::InvalidConfig, "webhook URL must start with http:// : " + url);
  }
  const auto slash = url.find('/', kScheme.size());
  base_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
  if (base_.size() == kScheme.size()) {
    throw Error(ErrorCode::InvalidConfig, "webhook URL has no host: " + url);
  }
}

void WebhookAlertSink::send(const Alert& alert) {
  httplib::Client client(base_);
  client.set_connection_timeout(5);
  client.set_read_timeout(5);
  const auto res = client.Post(path_, alert_json(alert), "application/json");
  if (!res) {
    throw Error(ErrorCode::SinkUnavailable,
                "webhook POST to " + base_ + path_ + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::SinkUnavailable,
                "webhook " + base_ + path_ + " answered HTTP " + std::to_string(res->status));
  }
}

void MemoryAlertSink::send(const Alert& alert) {
  std::lock_guard lock(mutex_);
  alerts_.push_back(alert);
}

std::vector<Alert> MemoryAlertSink::alerts() const {
  std::lock_guard lock(mutex_);
  return alerts_;
}

std::shared_ptr<AlertSink> make_alert_sink(const std::string& spec, std::ostream& stdout_stream) {
  if (spec.empty() || spec == "stdout") return std::make_shared<StreamAlertSink>(stdout_stream);
  return std::make_shared<WebhookAlertSink>(spec);
}

}  // namespace sttk
