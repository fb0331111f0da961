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

#include "qms/common/time.hpp"
#include "qms/storage/document_store.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace qms::dmdgs {

using Value = nlohmann::json;

/// Confirms that `model_id` is registered and visible to `user_id`; throws
/// qms::Error (kNotFound, kForbidden, kUnavailable) otherwise.
using ModelLookup = std::function<void(const std::string& user_id, const std::string& model_id)>;

/// Asks the RMS service: GET <rms_url>/rms/models/<id>.
ModelLookup rms_model_lookup(std::string rms_url,
                             std::chrono::milliseconds timeout = std::chrono::seconds(10));

/// Data references (name, origin, type, domain, size, split of a dataset
/// used with a model) and their compliance attestations. References are
/// immutable; a changed dataset needs a new reference and check.
class DmdgsService {
 public:
  DmdgsService(storage::DocumentStore& store, ModelLookup lookup, Clock clock = system_clock());

  Value ensure_user(const std::string& user_id);
  /// {"user_id", "data_ids"}; kNotFound for unknown users.
  Value get_user(const std::string& user_id) const;
  std::vector<std::string> user_ids() const;

  /// Request: {"model_id", "dataset_name", "origin", "data_type", "domain",
  /// "size":{"value", "unit"}, "split", "compliance_reference"}. Creates the
  /// reference and its check together (the reference is removed again if
  /// the check cannot be stored) and appends the reference id to the
  /// user's data_ids. Returns {"reference", "check"}.
  Value create_data_check(const std::string& user_id, const Value& request);
  /// {"reference", "check"} pairs of this user, newest check first.
  std::vector<Value> list_data_checks(const std::string& user_id,
                                      const std::optional<std::string>& model_id = std::nullopt) const;
  Value get_data_check(const std::string& user_id, const std::string& check_id) const;

 private:
  storage::DocumentStore& store_;
  ModelLookup lookup_;
  Clock clock_;
  std::mutex users_mu_;
};

}  // namespace qms::dmdgs
