// Copyright 2026 The QMS Authors.
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

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace qms {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kConflict,
  kUnauthorized,
  kForbidden,
  kFailedPrecondition,
  kUnsupported,
  kUnavailable,
  kTimeout,
  kInternal,
};

std::string_view to_string(ErrorCode code);
ErrorCode error_code_from_string(std::string_view name);

/// HTTP status used when an error of this kind crosses a service boundary.
int http_status(ErrorCode code);
ErrorCode error_code_from_status(int status);

/// The single exception type raised by qms libraries. `details` carries
/// machine-readable context (e.g. vocabulary suggestions) for API clients.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        nlohmann::json details = nullptr);

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }

  nlohmann::json to_json() const;
  static Error from_json(const nlohmann::json& body, int status);

 private:
  ErrorCode code_;
  nlohmann::json details_;
};

}  // namespace qms
