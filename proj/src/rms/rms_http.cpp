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

#include "qms/rms/rms_http.hpp"

#include "qms/common/http.hpp"

namespace qms::rms {
namespace {

using httplib::Request;
using httplib::Response;

constexpr const char* kId = "([0-9a-zA-Z]+)";

Value items(std::vector<Value> list) { return {{"items", std::move(list)}}; }

Value rule_json(const RiskRule& r) {
  Value when = Value::object();
  for (const auto& [field, terms] : r.when) when[field] = terms;
  return {{"name", r.name}, {"class", to_string(r.risk_class)}, {"description", r.description}, {"when", when}};
}

std::string path_id(const Request& req, std::size_t i = 1) { return req.matches[i].str(); }

}  // namespace

void register_routes(httplib::Server& server, RmsService& service) {
  auto route = [](auto fn) {
    return http::guarded([fn](const Request& req, Response& res) { fn(req, res, http::require_user(req)); });
  };
  const std::string id = kId;

  server.Post("/rms/users", route([&service](const Request& req, Response& res, const std::string& user) {
    const auto body = http::parse_json_body(req);
    const auto target = body.value("user_id", "");
    if (target != user) throw Error(ErrorCode::kForbidden, "user_id does not match the caller");
    http::send_json(res, 200, service.ensure_user(target));
  }));
  server.Get("/rms/users/me", route([&service](const Request&, Response& res, const std::string& user) {
    http::send_json(res, 200, service.get_user(user));
  }));

  server.Get("/rms/vocabulary", http::guarded([&service](const Request&, Response& res) {
    const auto& c = service.classifier();
    Value fields = Value::object();
    for (const auto& [name, terms] : c.vocabulary().fields) fields[name] = terms;
    auto rules = Value::array();
    for (const auto& r : c.rules().rules) rules.push_back(rule_json(r));
    http::send_json(res, 200, {{"version", c.vocabulary().version},
                               {"fields", fields},
                               {"rules_version", c.rules().version},
                               {"rules", rules},
                               {"default", rule_json(c.rules().fallback)}});
  }));

  server.Post("/rms/models", route([&service](const Request& req, Response& res, const std::string& user) {
    http::send_json(res, 201, service.register_model(user, http::parse_json_body(req)));
  }));
  server.Get("/rms/models", route([&service](const Request&, Response& res, const std::string& user) {
    http::send_json(res, 200, items(service.list_models(user)));
  }));
  server.Get("/rms/models/" + id, route([&service](const Request& req, Response& res, const std::string& user) {
    http::send_json(res, 200, service.get_model(user, path_id(req)));
  }));

  server.Post("/rms/identifications", route([&service](const Request& req, Response& res, const std::string& user) {
    http::send_json(res, 201, service.create_identification(user, http::parse_json_body(req)));
  }));
  server.Get("/rms/identifications", route([&service](const Request&, Response& res, const std::string& user) {
    http::send_json(res, 200, items(service.list_identifications(user)));
  }));
  server.Get("/rms/identifications/" + id,
             route([&service](const Request& req, Response& res, const std::string& user) {
               http::send_json(res, 200, service.get_identification(user, path_id(req)));
             }));

  server.Post("/rms/datasets", route([&service](const Request& req, Response& res, const std::string& user) {
    http::send_json(res, 201, service.create_dataset(user, http::parse_json_body(req)));
  }));
  server.Get("/rms/datasets", route([&service](const Request&, Response& res, const std::string& user) {
    http::send_json(res, 200, items(service.list_datasets(user)));
  }));
  server.Get("/rms/datasets/" + id, route([&service](const Request& req, Response& res, const std::string& user) {
    http::send_json(res, 200, service.get_dataset(user, path_id(req)));
  }));

  server.Post("/rms/analyses", route([&service](const Request& req, Response& res, const std::string& user) {
    http::send_json(res, 202, service.start_analysis(user, http::parse_json_body(req)));
  }));
  server.Get("/rms/analyses", route([&service](const Request&, Response& res, const std::string& user) {
    http::send_json(res, 200, items(service.list_analyses(user)));
  }));
  server.Get("/rms/analyses/" + id, route([&service](const Request& req, Response& res, const std::string& user) {
    http::send_json(res, 200, service.get_analysis(user, path_id(req)));
  }));
  server.Get("/rms/jobs/" + id, route([&service](const Request& req, Response& res, const std::string& user) {
    http::send_json(res, 200, service.get_job(user, path_id(req)));
  }));

  server.Post("/rms/assessments", route([&service](const Request& req, Response& res, const std::string& user) {
    const auto body = http::parse_json_body(req);
    http::send_json(res, 201, service.assemble_assessment(user, body.value("identification_id", ""),
                                                          body.value("analysis_id", "")));
  }));
  server.Get("/rms/assessments", route([&service](const Request& req, Response& res, const std::string& user) {
    if (req.has_param("user") && req.get_param_value("user") != user) {
      throw Error(ErrorCode::kForbidden, "cannot list another user's assessments");
    }
    http::send_json(res, 200, items(service.list_assessments(user)));
  }));
  server.Get("/rms/assessments/" + id,
             route([&service](const Request& req, Response& res, const std::string& user) {
               http::send_json(res, 200, service.get_assessment(user, path_id(req)));
             }));
  server.Get("/rms/assessments/" + id + "/bundle",
             route([&service](const Request& req, Response& res, const std::string& user) {
               http::send_json(res, 200, service.assessment_bundle(user, path_id(req)));
             }));
  server.Post("/rms/assessments/" + id + "/mitigations",
              route([&service](const Request& req, Response& res, const std::string& user) {
                const auto body = http::parse_json_body(req);
                http::send_json(res, 201, service.add_mitigation(user, path_id(req), body.value("description", "")));
              }));
  server.Get("/rms/assessments/" + id + "/mitigations",
             route([&service](const Request& req, Response& res, const std::string& user) {
               http::send_json(res, 200, items(service.list_mitigations(user, path_id(req))));
             }));
}

}  // namespace qms::rms
