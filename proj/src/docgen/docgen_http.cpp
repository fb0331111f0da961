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

#include "qms/docgen/docgen_http.hpp"

#include "qms/common/http.hpp"

#include <sstream>

namespace qms::docgen {

DocgenService::DocgenService(std::string rms_url, std::string dmdgs_url, Clock clock,
                             std::chrono::milliseconds timeout)
    : rms_url_(std::move(rms_url)), dmdgs_url_(std::move(dmdgs_url)), clock_(std::move(clock)), timeout_(timeout) {}

Value DocgenService::build(const std::string& user_id, const std::string& assessment_id,
                           const std::optional<std::vector<std::string>>& data_check_ids) const {
  const httplib::Headers as_user{{http::kUserIdHeader, user_id}};
  const auto bundle = http::JsonClient(rms_url_, timeout_)
                          .get("/rms/assessments/" + http::url_encode(assessment_id) + "/bundle", as_user)
                          .json_or_throw();
  const http::JsonClient dmdgs(dmdgs_url_, timeout_);
  std::vector<Value> checks;
  if (data_check_ids) {
    for (const auto& id : *data_check_ids) {
      checks.push_back(dmdgs.get("/dmdgs/data-checks/" + http::url_encode(id), as_user).json_or_throw());
    }
  } else {
    const auto model_id = bundle["analysis"]["model_id"].get<std::string>();
    const auto list =
        dmdgs.get(http::with_query("/dmdgs/data-checks", {{"model", model_id}}), as_user).json_or_throw();
    for (const auto& c : list["items"]) checks.push_back(c);
  }
  return build_documentation(bundle, checks, clock_());
}

void register_routes(httplib::Server& server, const DocgenService& service) {
  server.Get("/docgen/assessments/([0-9a-zA-Z]+)/document",
             http::guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const auto user = http::require_user(req);
               const auto format = req.has_param("format") ? req.get_param_value("format") : "markdown";
               if (format != "markdown" && format != "json") {
                 throw Error(ErrorCode::kInvalidArgument, "format must be markdown or json", {{"field", "format"}});
               }
               std::optional<std::vector<std::string>> ids;
               if (req.has_param("data_checks")) {
                 ids.emplace();
                 std::istringstream in(req.get_param_value("data_checks"));
                 for (std::string id; std::getline(in, id, ',');) {
                   if (!id.empty()) ids->push_back(id);
                 }
               }
               const auto id = req.matches[1].str();
               const auto doc = service.build(user, id, ids);
               if (format == "json") {
                 http::send_json(res, 200, doc);
                 return;
               }
               res.status = 200;
               res.set_header("Content-Disposition", "attachment; filename=\"assessment-" + id + ".md\"");
               res.set_content(render_markdown(doc), "text/markdown; charset=utf-8");
             }));
}

}  // namespace qms::docgen
