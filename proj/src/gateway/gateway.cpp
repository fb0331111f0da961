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

#include "qms/gateway/gateway.hpp"

#include "qms/common/error.hpp"
#include "qms/common/http.hpp"

#include <algorithm>
#include <set>

namespace qms::gateway {
namespace {

// Headers that describe the client connection rather than the request.
// httplib also stores the peer addresses as pseudo headers.
const std::set<std::string, httplib::detail::ci> kDroppedRequestHeaders{
    "Host",        "Content-Length", "Connection",  "Keep-Alive",  "Transfer-Encoding",
    "X-User-Id",   "REMOTE_ADDR",    "REMOTE_PORT", "LOCAL_ADDR", "LOCAL_PORT"};
const std::set<std::string, httplib::detail::ci> kDroppedResponseHeaders{
    "Content-Length", "Connection", "Keep-Alive", "Transfer-Encoding"};

void fail(httplib::Response& res, int status, ErrorCode code, const std::string& message) {
  http::send_json(res, status, Error(code, message).to_json());
}

httplib::Client client_for(const std::string& origin, std::chrono::milliseconds timeout) {
  httplib::Client cli(origin);
  const auto secs = timeout.count() / 1000;
  const auto usecs = (timeout.count() % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  return cli;
}

bool timed_out(httplib::Error err, std::chrono::steady_clock::duration elapsed, std::chrono::milliseconds limit) {
  return err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && elapsed >= limit);
}

}  // namespace

Gateway::Gateway(RouteTable routes, GatewayOptions options)
    : routes_(std::move(routes)), options_(std::move(options)) {}

void Gateway::register_routes(httplib::Server& server) const {
  const std::string pattern = R"(/api/([^/]+)(/.*)?)";
  auto handler = [this](const httplib::Request& req, httplib::Response& res) { forward(req, res); };
  server.Get(pattern, handler);
  server.Post(pattern, handler);
  server.Put(pattern, handler);
  server.Patch(pattern, handler);
  server.Delete(pattern, handler);
  server.Options(pattern, handler);
  server.Get("/health", [this](const httplib::Request& req, httplib::Response& res) {
    apply_cors(req, res);
    nlohmann::json routes = nlohmann::json::array();
    for (const auto& [prefix, address] : routes_.entries()) routes.push_back(prefix);
    http::send_json(res, 200, {{"status", "ok"}, {"routes", routes}});
  });
}

void Gateway::apply_cors(const httplib::Request& req, httplib::Response& res) const {
  const auto origin = req.get_header_value("Origin");
  if (origin.empty()) return;
  const auto& allowed = options_.cors_origins;
  const bool any = std::find(allowed.begin(), allowed.end(), "*") != allowed.end();
  if (!any && std::find(allowed.begin(), allowed.end(), origin) == allowed.end()) return;
  res.set_header("Access-Control-Allow-Origin", origin);
  res.set_header("Vary", "Origin");
  res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type");
  res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, PATCH, DELETE, OPTIONS");
  res.set_header("Access-Control-Expose-Headers", "Content-Disposition");
}

std::string Gateway::authenticate(const httplib::Request& req, httplib::Response& res) const {
  const auto token = http::bearer_token(req);
  if (!token) {
    fail(res, 401, ErrorCode::kUnauthorized, "missing bearer token");
    return {};
  }
  const auto auth = routes_.find(options_.auth_prefix);
  if (!auth) {
    fail(res, 502, ErrorCode::kUnavailable, "no route for the auth service");
    return {};
  }
  auto cli = client_for(*auth, options_.upstream_timeout);
  const auto started = std::chrono::steady_clock::now();
  auto r = cli.Get("/" + options_.auth_prefix + "/verify", {{"Authorization", "Bearer " + *token}});
  if (!r) {
    const bool slow = timed_out(r.error(), std::chrono::steady_clock::now() - started, options_.upstream_timeout);
    fail(res, slow ? 504 : 502, slow ? ErrorCode::kTimeout : ErrorCode::kUnavailable,
         "auth service unavailable: " + httplib::to_string(r.error()));
    return {};
  }
  if (r->status == 401 || r->status == 403) {
    fail(res, 401, ErrorCode::kUnauthorized, "invalid or expired token");
    return {};
  }
  const auto body = nlohmann::json::parse(r->body, nullptr, false);
  if (r->status != 200 || !body.is_object() || !body.contains("user_id") || !body["user_id"].is_string()) {
    fail(res, 502, ErrorCode::kUnavailable, "unexpected reply from the auth service");
    return {};
  }
  return body["user_id"].get<std::string>();
}

void Gateway::forward(const httplib::Request& req, httplib::Response& res) const {
  apply_cors(req, res);
  if (req.method == "OPTIONS") {
    res.status = 204;
    return;
  }
  const auto prefix = req.matches[1].str();
  const auto address = routes_.find(prefix);
  if (!address) {
    fail(res, 404, ErrorCode::kNotFound, "no service for prefix '" + prefix + "'");
    return;
  }
  const bool open = prefix == options_.auth_prefix &&
                    (req.path == "/api/" + prefix + "/signup" || req.path == "/api/" + prefix + "/signin");
  std::string user;
  if (!open) {
    user = authenticate(req, res);
    if (user.empty()) return;
  }

  httplib::Request upstream;
  upstream.method = req.method;
  // The raw target keeps the client's exact encoding and query string.
  upstream.path = req.target.substr(std::string_view("/api").size());
  for (const auto& [name, value] : req.headers) {
    if (!kDroppedRequestHeaders.contains(name)) upstream.headers.emplace(name, value);
  }
  if (!user.empty()) upstream.headers.emplace(http::kUserIdHeader, user);
  upstream.body = req.body;

  auto cli = client_for(*address, options_.upstream_timeout);
  const auto started = std::chrono::steady_clock::now();
  auto r = cli.send(upstream);
  if (!r) {
    const bool slow = timed_out(r.error(), std::chrono::steady_clock::now() - started, options_.upstream_timeout);
    fail(res, slow ? 504 : 502, slow ? ErrorCode::kTimeout : ErrorCode::kUnavailable,
         "service '" + prefix + "' " + (slow ? "timed out" : "unreachable: " + httplib::to_string(r.error())));
    return;
  }
  res.status = r->status;
  for (const auto& [name, value] : r->headers) {
    if (!kDroppedResponseHeaders.contains(name) && !res.has_header(name)) res.set_header(name, value);
  }
  res.body = std::move(r->body);
}

}  // namespace qms::gateway
