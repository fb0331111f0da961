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

#include "qms/auth/auth_service.hpp"

#include "qms/common/error.hpp"
#include "qms/common/http.hpp"

#include <algorithm>
#include <regex>

namespace qms::auth {
namespace {

constexpr std::size_t kMinPasswordLength = 8;
constexpr std::size_t kTokenBytes = 32;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::optional<std::string> normalize_email(std::string_view email) {
  static const std::regex kPattern(R"(^[^@\s]+@[^@\s.]+(\.[^@\s.]+)+$)");
  auto out = trim(email);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (out.size() > 254 || !std::regex_match(out, kPattern)) return std::nullopt;
  return out;
}

HttpUserPropagator::HttpUserPropagator(std::map<std::string, std::string> addresses,
                                       std::chrono::milliseconds timeout)
    : addresses_(std::move(addresses)), timeout_(timeout) {}

std::vector<std::string> HttpUserPropagator::services() const {
  std::vector<std::string> out;
  for (const auto& [name, addr] : addresses_) out.push_back(name);
  return out;
}

void HttpUserPropagator::propagate(const std::string& service, const std::string& user_id) {
  auto it = addresses_.find(service);
  if (it == addresses_.end()) throw Error(ErrorCode::kNotFound, "no address for service " + service);
  http::JsonClient client(it->second, timeout_);
  client.post("/" + service + "/users", {{"user_id", user_id}}, {{http::kUserIdHeader, user_id}})
      .json_or_throw();
}

AuthService::AuthService(storage::DocumentStore& store, PasswordHasher hasher,
                         UserPropagator& propagator, Clock clock, AuthOptions options)
    : store_(store),
      hasher_(hasher),
      propagator_(propagator),
      clock_(std::move(clock)),
      options_(options) {}

SignupResult AuthService::signup(const std::string& username, const std::string& email,
                                 const std::string& password) {
  const auto name = trim(username);
  if (name.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "username must not be empty", {{"reason", "empty-username"}});
  }
  const auto normalized = normalize_email(email);
  if (!normalized) {
    throw Error(ErrorCode::kInvalidArgument, "email address is not valid", {{"reason", "invalid-email"}});
  }
  if (password.size() < kMinPasswordLength) {
    throw Error(ErrorCode::kInvalidArgument, "password must be at least 8 characters",
                {{"reason", "weak-password"}});
  }
  // Hash outside the lock; it is the slow part.
  const auto hash = hasher_.hash(password);

  SignupResult result;
  {
    std::lock_guard lock(signup_mu_);
    if (!store_.query("users", {{"email", *normalized}}).empty()) {
      throw Error(ErrorCode::kConflict, "an account with this email already exists",
                  {{"reason", "duplicate-email"}});
    }
    result.user_id = store_.insert("users", {{"username", name},
                                             {"email", *normalized},
                                             {"password_hash", hash},
                                             {"created_at", format_timestamp(clock_())}});
  }
  for (const auto& service : propagator_.services()) {
    if (auto failure = try_propagate(service, result.user_id)) {
      store_.insert("pending_propagations", {{"user_id", result.user_id},
                                             {"service", service},
                                             {"attempts", 1},
                                             {"last_error", failure->error}});
      result.propagation.push_back(std::move(*failure));
    } else {
      result.propagation.push_back({service, result.user_id, true, {}});
    }
  }
  return result;
}

std::optional<PropagationStatus> AuthService::try_propagate(const std::string& service,
                                                            const std::string& user_id) {
  try {
    propagator_.propagate(service, user_id);
    return std::nullopt;
  } catch (const std::exception& e) {
    return PropagationStatus{service, user_id, false, e.what()};
  }
}

const std::string& AuthService::dummy_hash() const {
  std::call_once(dummy_once_, [this] { dummy_hash_ = hasher_.hash(random_hex(16)); });
  return dummy_hash_;
}

Session AuthService::signin(const std::string& email, const std::string& password) {
  const Error invalid(ErrorCode::kUnauthorized, "invalid credentials");
  const auto normalized = normalize_email(email);
  const auto users = normalized ? store_.query("users", {{"email", *normalized}})
                                : std::vector<storage::Document>{};
  if (users.empty()) {
    // Spend the same hashing work as a real check so timing does not reveal
    // whether the email exists.
    hasher_.verify(dummy_hash(), password);
    throw invalid;
  }
  const auto& user = users.front();
  if (!hasher_.verify(user.body.at("password_hash").get<std::string>(), password)) throw invalid;

  Session session{random_hex(kTokenBytes), user.id, clock_() + options_.session_ttl};
  store_.insert("sessions", {{"token_digest", digest_hex(session.token)},
                             {"user_id", session.user_id},
                             {"expires_at", format_timestamp(session.expires_at)}});
  return session;
}

std::string AuthService::verify(const std::string& token) const {
  const Error unauthorized(ErrorCode::kUnauthorized, "invalid or expired token");
  if (token.empty()) throw unauthorized;
  const auto sessions = store_.query("sessions", {{"token_digest", digest_hex(token)}});
  if (sessions.empty()) throw unauthorized;
  const auto& s = sessions.front();
  if (parse_timestamp(s.body.at("expires_at").get<std::string>()) <= clock_()) throw unauthorized;
  return s.body.at("user_id").get<std::string>();
}

void AuthService::signout(const std::string& token) {
  if (token.empty()) return;
  for (const auto& s : store_.query("sessions", {{"token_digest", digest_hex(token)}})) {
    store_.remove("sessions", s.id);
  }
}

std::vector<PropagationStatus> AuthService::retry_pending() {
  std::lock_guard lock(retry_mu_);
  std::vector<PropagationStatus> report;
  for (const auto& doc : store_.query("pending_propagations")) {
    const auto user_id = doc.body.at("user_id").get<std::string>();
    const auto service = doc.body.at("service").get<std::string>();
    if (auto failure = try_propagate(service, user_id)) {
      auto body = doc.body;
      body["attempts"] = body.value("attempts", 0) + 1;
      body["last_error"] = failure->error;
      store_.update("pending_propagations", doc.id, std::move(body));
      report.push_back(std::move(*failure));
    } else {
      store_.remove("pending_propagations", doc.id);
      report.push_back({service, user_id, true, {}});
    }
  }
  return report;
}

std::size_t AuthService::pending_count() const { return store_.query("pending_propagations").size(); }

std::vector<std::string> AuthService::user_ids() const {
  std::vector<std::string> out;
  for (const auto& d : store_.query("users")) out.push_back(d.id);
  return out;
}

}  // namespace qms::auth
