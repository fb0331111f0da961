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

#include "qms/dmdgs/dmdgs_http.hpp"

#include "qms/common/http.hpp"

namespace qms::dmdgs {

using httplib::Request;
using httplib::Response;

void register_routes(httplib::Server& server, DmdgsService& service) {
  auto route = [](auto fn) {
    return http::guarded([fn](const Request& req, Response& res) { fn(req, res, http::require_user(req)); });
  };

  server.Post("/dmdgs/users", route([&service](const Request& req, Response& res, const std::string& user) {
    const auto body = http::parse_json_body(req);
    if (body.value("user_id", "") != user) throw Error(ErrorCode::kForbidden, "user_id does not match the caller");
    http::send_json(res, 200, service.ensure_user(user));
  }));
  server.Get("/dmdgs/users/me", route([&service](const Request&, Response& res, const std::string& user) {
    http::send_json(res, 200, service.get_user(user));
  }));

  server.Post("/dmdgs/data-checks", route([&service](const Request& req, Response& res, const std::string& user) {
    http::send_json(res, 201, service.create_data_check(user, http::parse_json_body(req)));
  }));
  server.Get("/dmdgs/data-checks", route([&service](const Request& req, Response& res, const std::string& user) {
    if (req.has_param("user") && req.get_param_value("user") != user) {
      throw Error(ErrorCode::kForbidden, "cannot list another user's data checks");
    }
    std::optional<std::string> model;
    if (req.has_param("model")) model = req.get_param_value("model");
    http::send_json(res, 200, {{"items", service.list_data_checks(user, model)}});
  }));
  server.Get("/dmdgs/data-checks/([0-9a-zA-Z]+)",
             route([&service](const Request& req, Response& res, const std::string& user) {
               http::send_json(res, 200, service.get_data_check(user, req.matches[1].str()));
             }));
}

}  // namespace qms::dmdgs
