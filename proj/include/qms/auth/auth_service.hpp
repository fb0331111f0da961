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

#include "qms/auth/password_hasher.hpp"
#include "qms/common/time.hpp"
#include "qms/storage/document_store.hpp"

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace qms::auth {

/// Writes a new user id into another service's user collection.
class UserPropagator {
 public:
  virtual ~UserPropagator() = default;
  /// Services that must learn about every new user, e.g. {"rms", "dmdgs"}.
  virtual std::vector<std::string> services() const = 0;
  /// Idempotent. Throws qms::Error when the service cannot be reached or
  /// refuses the write.
  virtual void propagate(const std::string& service, const std::string& user_id) = 0;
};

/// POSTs `{"user_id": …}` to `<address>/<service>/users` for each service.
class HttpUserPropagator final : public UserPropagator {
 public:
  explicit HttpUserPropagator(std::map<std::string, std::string> addresses,
                              std::chrono::milliseconds timeout = std::chrono::seconds(10));
  std::vector<std::string> services() const override;
  void propagate(const std::string& service, const std::string& user_id) override;

 private:
  std::map<std::string, std::string> addresses_;
  std::chrono::milliseconds timeout_;
};

struct PropagationStatus {
  std::string service;
  std::string user_id;
  bool ok = false;
  std::string error;  // empty when ok
};

struct SignupResult {
  std::string user_id;
  std::vector<PropagationStatus> propagation;
};

struct Session {
  std::string token;
  std::string user_id;
  Timestamp expires_at;
};

struct AuthOptions {
  std::chrono::seconds session_ttl = std::chrono::hours(24);
};

/// Accounts and sessions. Collections: `users` (id, username, email,
/// password_hash, created_at), `sessions` (digest of the token only) and
/// `pending_propagations` (user ids a downstream service has not yet
/// acknowledged).
class AuthService {
 public:
  AuthService(storage::DocumentStore& store, PasswordHasher hasher, UserPropagator& propagator,
              Clock clock = system_clock(), AuthOptions options = {});

  /// kInvalidArgument for a malformed email, empty username or a password
  /// under 8 characters; kConflict for an email already registered. The
  /// account is created even when propagation fails; failed services are
  /// queued for retry_pending().
  SignupResult signup(const std::string& username, const std::string& email,
                      const std::string& password);
  /// kUnauthorized with the same message for unknown email and wrong password.
  Session signin(const std::string& email, const std::string& password);
  /// The owning user id; kUnauthorized for unknown, expired or revoked tokens.
  std::string verify(const std::string& token) const;
  /// Revokes the token. Unknown tokens are ignored.
  void signout(const std::string& token);

  /// Re-attempts every queued propagation; successful ones leave the queue.
  std::vector<PropagationStatus> retry_pending();
  std::size_t pending_count() const;
  std::vector<std::string> user_ids() const;

 private:
  std::optional<PropagationStatus> try_propagate(const std::string& service, const std::string& user_id);
  const std::string& dummy_hash() const;

  storage::DocumentStore& store_;
  PasswordHasher hasher_;
  UserPropagator& propagator_;
  Clock clock_;
  AuthOptions options_;
  std::mutex signup_mu_;
  std::mutex retry_mu_;
  mutable std::once_flag dummy_once_;
  mutable std::string dummy_hash_;
};

/// Lowercased, trimmed email; std::nullopt when it is not `local@domain.tld`.
std::optional<std::string> normalize_email(std::string_view email);

}  // namespace qms::auth
