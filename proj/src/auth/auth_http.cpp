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

#include "qms/auth/auth_http.hpp"

#include "qms/common/http.hpp"

namespace qms::auth {
namespace {

nlohmann::json report_json(const std::vector<PropagationStatus>& report) {
  auto out = nlohmann::json::array();
  for (const auto& p : report) {
    nlohmann::json entry = {{"service", p.service}, {"user_id", p.user_id}, {"status", p.ok ? "ok" : "pending"}};
    if (!p.ok) entry["error"] = p.error;
    out.push_back(std::move(entry));
  }
  return out;
}

std::string require_token(const httplib::Request& req) {
  auto token = http::bearer_token(req);
  if (!token) throw Error(ErrorCode::kUnauthorized, "missing bearer token");
  return *token;
}

}  // namespace

void register_routes(httplib::Server& server, AuthService& service) {
  server.Post("/auth/signup", http::guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto body = http::parse_json_body(req);
    const auto result = service.signup(body.value("username", ""), body.value("email", ""),
                                       body.value("password", ""));
    http::send_json(res, 201, {{"user_id", result.user_id}, {"propagation", report_json(result.propagation)}});
  }));

  server.Post("/auth/signin", http::guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto body = http::parse_json_body(req);
    const auto s = service.signin(body.value("email", ""), body.value("password", ""));
    http::send_json(res, 200, {{"token", s.token},
                               {"user_id", s.user_id},
                               {"expires_at", format_timestamp(s.expires_at)}});
  }));

  server.Post("/auth/signout", http::guarded([&service](const httplib::Request& req, httplib::Response& res) {
    service.signout(require_token(req));
    http::send_json(res, 200, {{"signed_out", true}});
  }));

  server.Get("/auth/verify", http::guarded([&service](const httplib::Request& req, httplib::Response& res) {
    http::send_json(res, 200, {{"user_id", service.verify(require_token(req))}});
  }));

  server.Post("/auth/propagation/retry",
              http::guarded([&service](const httplib::Request&, httplib::Response& res) {
                const auto report = service.retry_pending();
                http::send_json(res, 200, {{"results", report_json(report)}, {"pending", service.pending_count()}});
              }));
}

}  // namespace qms::auth
