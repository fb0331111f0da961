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

#include <cstddef>
#include <string>
#include <string_view>

namespace qms::auth {

/// argon2id cost parameters.
struct HashCost {
  unsigned long long opslimit;
  std::size_t memlimit;  // bytes

  /// libsodium's interactive profile (64 MiB, 2 passes).
  static HashCost interactive();
  /// Cheapest parameters libsodium accepts; for tests only.
  static HashCost minimum();
};

/// Salted, memory-hard password hashing. The encoded output carries the
/// algorithm, salt and cost parameters, so records hashed under older
/// parameters keep verifying after the defaults change.
class PasswordHasher {
 public:
  explicit PasswordHasher(HashCost cost = HashCost::interactive());

  std::string hash(std::string_view password) const;
  /// Constant-time with respect to the stored hash.
  bool verify(std::string_view encoded, std::string_view password) const;
  /// True when `encoded` was produced with different cost parameters.
  bool needs_rehash(std::string_view encoded) const;

 private:
  HashCost cost_;
};

/// `n` bytes from the system CSPRNG, hex encoded.
std::string random_hex(std::size_t n);
/// Keyless BLAKE2b-256 digest, hex encoded.
std::string digest_hex(std::string_view data);

}  // namespace qms::auth
