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

#include "qms/common/httplib.hpp"
#include "qms/gateway/route_table.hpp"

#include <chrono>
#include <string>
#include <vector>

namespace qms::gateway {

struct GatewayOptions {
  /// Single attempt per request, no retries.
  std::chrono::milliseconds upstream_timeout = std::chrono::seconds(30);
  /// Origins allowed to call the API from a browser; "*" allows any.
  std::vector<std::string> cors_origins;
  /// Route prefix of the service that answers GET /auth/verify.
  std::string auth_prefix = "auth";
};

/// Stateless reverse proxy: /api/<prefix>/<rest> goes to
/// <address>/<prefix>/<rest>. Bearer tokens are checked with the auth
/// service (except for signup and signin) and the verified user id is sent
/// upstream in X-User-Id; a client-supplied X-User-Id is dropped.
class Gateway {
 public:
  Gateway(RouteTable routes, GatewayOptions options = {});

  void register_routes(httplib::Server& server) const;
  const RouteTable& routes() const { return routes_; }

 private:
  void forward(const httplib::Request& req, httplib::Response& res) const;
  /// Verified user id, or an empty string after writing an error response.
  std::string authenticate(const httplib::Request& req, httplib::Response& res) const;
  void apply_cors(const httplib::Request& req, httplib::Response& res) const;

  RouteTable routes_;
  GatewayOptions options_;
};

}  // namespace qms::gateway
