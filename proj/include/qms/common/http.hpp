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

#include "qms/common/error.hpp"

#include "qms/common/httplib.hpp"
#include <nlohmann/json.hpp>

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qms::http {

/// Header carrying the gateway-verified user id to downstream services.
inline constexpr const char* kUserIdHeader = "X-User-Id";

struct Url {
  std::string scheme;
  std::string host;
  int port = 0;

  /// `scheme://host:port`, the form httplib::Client accepts.
  std::string origin() const;
};

/// Accepts `http://host[:port][/]`; throws kInvalidArgument otherwise.
Url parse_url(std::string_view text);
bool is_valid_url(std::string_view text);

void send_json(httplib::Response& res, int status, const nlohmann::json& body);
void send_error(httplib::Response& res, const Error& error);

nlohmann::json parse_json_body(const httplib::Request& req);

/// The verified user id attached by the gateway; kUnauthorized if absent.
std::string require_user(const httplib::Request& req);

/// Token from an `Authorization: Bearer <token>` header.
std::optional<std::string> bearer_token(const httplib::Request& req);

/// Wraps a handler so that qms::Error and JSON errors become JSON error
/// responses instead of escaping into httplib.
httplib::Server::Handler guarded(std::function<void(const httplib::Request&, httplib::Response&)> fn);

struct Reply {
  int status = 0;
  std::string body;
  std::string content_type;

  bool ok() const { return status >= 200 && status < 300; }
  nlohmann::json json() const;
  /// Throws the Error encoded in a non-2xx reply; returns json() otherwise.
  nlohmann::json json_or_throw() const;
};

/// Minimal blocking JSON client. Connection failures throw kUnavailable,
/// read timeouts throw kTimeout.
class JsonClient {
 public:
  explicit JsonClient(std::string base_url,
                      std::chrono::milliseconds timeout = std::chrono::seconds(30));

  Reply get(const std::string& path, const httplib::Headers& headers = {}) const;
  Reply post(const std::string& path, const nlohmann::json& body,
             const httplib::Headers& headers = {}) const;
  Reply del(const std::string& path, const httplib::Headers& headers = {}) const;

  const std::string& base_url() const { return base_url_; }

 private:
  Reply finish(httplib::Result result, std::chrono::steady_clock::time_point started,
               const std::string& path) const;

  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

std::string url_encode(std::string_view text);

/// Builds `path?k1=v1&k2=v2` with percent-encoded values; empty values skipped.
std::string with_query(std::string path,
                       const std::vector<std::pair<std::string, std::string>>& params);

}  // namespace qms::http
