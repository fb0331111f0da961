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

#include "qms/eval/http_model_adapter.hpp"

#include "qms/common/http.hpp"

namespace qms::eval {
namespace {

nlohmann::json rows_to_json(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.push_back(std::vector<double>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) rows.back()[static_cast<std::size_t>(c)] = m(r, c);
  }
  return rows;
}

Matrix rows_from_json(const nlohmann::json& j, Eigen::Index expected_rows) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (expected_rows >= 0 && rows != expected_rows) {
    throw Error(ErrorCode::kInternal, "model server returned a matrix of the wrong height");
  }
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = j.at(static_cast<std::size_t>(r)).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::kInternal, "model server returned a ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

std::vector<TokenId> ids(std::span<const TokenId> s) { return {s.begin(), s.end()}; }

}  // namespace

HttpModelAdapter::HttpModelAdapter(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  const auto body = http::JsonClient(base_url_, timeout_).get("/vocabulary").json_or_throw();
  tokenizer_ = std::make_unique<VocabularyTokenizer>(body.at("tokens").get<std::vector<std::string>>());
  if (body.contains("embeddings") && !body["embeddings"].is_null()) {
    embeddings_ = rows_from_json(body["embeddings"],
                                 static_cast<Eigen::Index>(tokenizer_->vocabulary().size()));
  }
}

Vector HttpModelAdapter::logits(std::span<const TokenId> context) const {
  const auto body = http::JsonClient(base_url_, timeout_)
                        .post("/logits", {{"context", ids(context)}})
                        .json_or_throw();
  const auto v = body.at("logits").get<std::vector<double>>();
  if (v.size() != tokenizer_->vocabulary().size()) {
    throw Error(ErrorCode::kInternal, "model server returned logits of the wrong size");
  }
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<TokenId> HttpModelAdapter::generate(std::span<const TokenId> prompt,
                                                int max_new_tokens) const {
  const auto body =
      http::JsonClient(base_url_, timeout_)
          .post("/generate", {{"prompt", ids(prompt)}, {"max_new_tokens", max_new_tokens}, {"greedy", true}})
          .json_or_throw();
  auto out = body.at("tokens").get<std::vector<TokenId>>();
  if (static_cast<int>(out.size()) > max_new_tokens) out.resize(static_cast<std::size_t>(max_new_tokens));
  return out;
}

Matrix HttpModelAdapter::input_gradient(std::span<const TokenId> prompt,
                                        std::span<const TokenId> target) const {
  const auto reply = http::JsonClient(base_url_, timeout_)
                         .post("/input_gradient", {{"prompt", ids(prompt)}, {"target", ids(target)}});
  if (reply.status == 404 || reply.status == 405) {
    throw Error(ErrorCode::kUnsupported, "model server " + base_url_ + " has no gradient endpoint");
  }
  return rows_from_json(reply.json_or_throw().at("gradient"), static_cast<Eigen::Index>(prompt.size()));
}

const Matrix& HttpModelAdapter::embeddings() const {
  if (!embeddings_) return ModelAdapter::embeddings();
  return *embeddings_;
}

void serve_model(httplib::Server& server, std::shared_ptr<const ModelAdapter> model,
                 ServeModelOptions options) {
  server.Get("/vocabulary", http::guarded([model, options](const httplib::Request&, httplib::Response& res) {
    nlohmann::json body{{"tokens", model->vocabulary()}};
    if (options.expose_embeddings && model->has_embeddings()) body["embeddings"] = rows_to_json(model->embeddings());
    http::send_json(res, 200, body);
  }));
  server.Post("/logits", http::guarded([model](const httplib::Request& req, httplib::Response& res) {
    const auto ctx = http::parse_json_body(req).at("context").get<std::vector<TokenId>>();
    const Vector z = model->logits(ctx);
    http::send_json(res, 200, {{"logits", std::vector<double>(z.data(), z.data() + z.size())}});
  }));
  server.Post("/generate", http::guarded([model](const httplib::Request& req, httplib::Response& res) {
    const auto body = http::parse_json_body(req);
    const auto prompt = body.at("prompt").get<std::vector<TokenId>>();
    http::send_json(res, 200, {{"tokens", model->generate(prompt, body.value("max_new_tokens", 64))}});
  }));
  if (options.expose_gradients) {
    server.Post("/input_gradient", http::guarded([model](const httplib::Request& req, httplib::Response& res) {
      const auto body = http::parse_json_body(req);
      const auto grad = model->input_gradient(body.at("prompt").get<std::vector<TokenId>>(),
                                              body.at("target").get<std::vector<TokenId>>());
      http::send_json(res, 200, {{"gradient", rows_to_json(grad)}});
    }));
  }
}

}  // namespace qms::eval
