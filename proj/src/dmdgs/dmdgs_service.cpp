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

#include "qms/dmdgs/dmdgs_service.hpp"

#include "qms/common/error.hpp"
#include "qms/common/http.hpp"

#include <algorithm>
#include <set>

namespace qms::dmdgs {
namespace {

const std::set<std::string> kSplits{"training", "validation", "testing"};
const std::set<std::string> kUnits{"examples", "tokens", "bytes"};

std::string required_text(const Value& request, const char* field) {
  if (!request.contains(field) || !request[field].is_string() ||
      request[field].get<std::string>().find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + field + "' must be non-empty text",
                {{"field", field}});
  }
  return request[field].get<std::string>();
}

Value entry(const storage::Document& reference, const storage::Document& check) {
  Value r = reference.body;
  r["id"] = reference.id;
  r["created_at"] = format_timestamp(reference.created_at);
  Value c = check.body;
  c["id"] = check.id;
  return {{"reference", std::move(r)}, {"check", std::move(c)}};
}

}  // namespace

ModelLookup rms_model_lookup(std::string rms_url, std::chrono::milliseconds timeout) {
  return [url = std::move(rms_url), timeout](const std::string& user_id, const std::string& model_id) {
    http::JsonClient(url, timeout)
        .get("/rms/models/" + http::url_encode(model_id), {{http::kUserIdHeader, user_id}})
        .json_or_throw();
  };
}

DmdgsService::DmdgsService(storage::DocumentStore& store, ModelLookup lookup, Clock clock)
    : store_(store), lookup_(std::move(lookup)), clock_(std::move(clock)) {}

Value DmdgsService::ensure_user(const std::string& user_id) {
  if (user_id.empty()) throw Error(ErrorCode::kInvalidArgument, "user_id must not be empty");
  std::lock_guard lock(users_mu_);
  const auto existing = store_.query("users", {{"user_id", user_id}});
  if (!existing.empty()) return existing.front().body;
  Value body = {{"user_id", user_id}, {"data_ids", Value::array()}};
  store_.insert("users", body);
  return body;
}

Value DmdgsService::get_user(const std::string& user_id) const {
  const auto docs = store_.query("users", {{"user_id", user_id}});
  if (docs.empty()) throw Error(ErrorCode::kNotFound, "user " + user_id + " not found");
  return docs.front().body;
}

std::vector<std::string> DmdgsService::user_ids() const {
  std::vector<std::string> out;
  for (const auto& d : store_.query("users")) out.push_back(d.body.at("user_id").get<std::string>());
  return out;
}

Value DmdgsService::create_data_check(const std::string& user_id, const Value& request) {
  if (!request.is_object()) throw Error(ErrorCode::kInvalidArgument, "request must be an object");
  const auto model_id = required_text(request, "model_id");
  Value reference = {{"user_id", user_id},
                     {"model_id", model_id},
                     {"dataset_name", required_text(request, "dataset_name")},
                     {"origin", required_text(request, "origin")},
                     {"data_type", required_text(request, "data_type")},
                     {"domain", required_text(request, "domain")}};
  const auto split = required_text(request, "split");
  if (!kSplits.contains(split)) {
    throw Error(ErrorCode::kInvalidArgument, "split must be training, validation or testing", {{"field", "split"}});
  }
  reference["split"] = split;
  const auto& size = request.value("size", Value());
  if (!size.is_object() || !size.contains("value") || !size["value"].is_number_integer() ||
      size["value"].get<long long>() < 0 || !size.contains("unit") || !size["unit"].is_string() ||
      !kUnits.contains(size["unit"].get<std::string>())) {
    throw Error(ErrorCode::kInvalidArgument,
                "size must be {\"value\": non-negative integer, \"unit\": examples|tokens|bytes}",
                {{"field", "size"}});
  }
  reference["size"] = {{"value", size["value"]}, {"unit", size["unit"]}};
  const auto compliance = required_text(request, "compliance_reference");

  lookup_(user_id, model_id);

  const auto reference_id = store_.insert("data_references", reference);
  std::string check_id;
  try {
    check_id = store_.insert("data_checks", {{"user_id", user_id},
                                             {"data_reference_id", reference_id},
                                             {"model_id", model_id},
                                             {"compliance_reference", compliance},
                                             {"checked_at", format_timestamp(clock_())}});
    ensure_user(user_id);
    std::lock_guard lock(users_mu_);
    const auto user = store_.query("users", {{"user_id", user_id}}).front();
    auto body = user.body;
    body["data_ids"].push_back(reference_id);
    store_.update("users", user.id, std::move(body));
  } catch (...) {
    if (!check_id.empty()) store_.remove("data_checks", check_id);
    store_.remove("data_references", reference_id);
    throw;
  }
  return entry(*store_.get("data_references", reference_id), *store_.get("data_checks", check_id));
}

std::vector<Value> DmdgsService::list_data_checks(const std::string& user_id,
                                                  const std::optional<std::string>& model_id) const {
  Value filter = {{"user_id", user_id}};
  if (model_id) filter["model_id"] = *model_id;
  auto checks = store_.query("data_checks", filter);
  // Newest first; timestamps share one format, so string order is time order.
  std::stable_sort(checks.begin(), checks.end(), [](const auto& a, const auto& b) {
    const auto ta = a.body["checked_at"].template get<std::string>();
    const auto tb = b.body["checked_at"].template get<std::string>();
    return ta != tb ? ta > tb : a.sequence > b.sequence;
  });
  std::vector<Value> out;
  for (const auto& c : checks) {
    if (auto r = store_.get("data_references", c.body["data_reference_id"].get<std::string>())) {
      out.push_back(entry(*r, c));
    }
  }
  return out;
}

Value DmdgsService::get_data_check(const std::string& user_id, const std::string& check_id) const {
  const auto check = store_.get("data_checks", check_id);
  if (!check) throw Error(ErrorCode::kNotFound, "data check " + check_id + " not found");
  if (check->body.value("user_id", "") != user_id) {
    throw Error(ErrorCode::kForbidden, "data check " + check_id + " belongs to another user");
  }
  const auto reference = store_.get("data_references", check->body["data_reference_id"].get<std::string>());
  if (!reference) throw Error(ErrorCode::kInternal, "data check without reference");
  return entry(*reference, *check);
}

}  // namespace qms::dmdgs
