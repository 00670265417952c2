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

#include <stdexcept>
#include <string>
#include <string_view>

namespace sttk {

enum class ErrorCode {
  InvalidArgument,
  Io,
  TooShort,
  BadMagic,
  UnsupportedLinkType,
  TruncatedRecord,
  EmptyRegistry,
  BadVersion,
  BadLength,
  DecodeError,
  InvariantViolation,
  SinkUnavailable,
  InvalidScenario,
  InvalidConfig,
};

// All recoverable failures in the library are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedLinkType: return "UnsupportedLinkType";
    case ErrorCode::TruncatedRecord: return "TruncatedRecord";
    case ErrorCode::EmptyRegistry: return "EmptyRegistry";
    case ErrorCode::BadVersion: return "BadVersion";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::SinkUnavailable: return "SinkUnavailable";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace sttk
