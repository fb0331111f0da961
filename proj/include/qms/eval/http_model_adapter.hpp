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

#include "qms/eval/model_adapter.hpp"

#include <chrono>
#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace qms::eval {

/// Model served over HTTP/JSON. Wire contract (token ids everywhere):
///
///   GET  /vocabulary      -> {"tokens":[..], "embeddings":[[..]]?}
///   POST /logits          {"context":[..]}                      -> {"logits":[..]}
///   POST /generate        {"prompt":[..],"max_new_tokens":n,"greedy":true} -> {"tokens":[..]}
///   POST /input_gradient  {"prompt":[..],"target":[..]}         -> {"gradient":[[..]]}
///
/// A server without /input_gradient (404/405) makes gradient metrics report
/// kUnsupported. The vocabulary is fetched once, at construction.
class HttpModelAdapter final : public ModelAdapter {
 public:
  explicit HttpModelAdapter(std::string base_url,
                            std::chrono::milliseconds timeout = std::chrono::seconds(30));

  const VocabularyTokenizer& tokenizer() const override { return *tokenizer_; }
  Vector logits(std::span<const TokenId> context) const override;
  std::vector<TokenId> generate(std::span<const TokenId> prompt, int max_new_tokens) const override;
  bool supports_gradients() const override { return true; }
  Matrix input_gradient(std::span<const TokenId> prompt,
                        std::span<const TokenId> target) const override;
  bool has_embeddings() const override { return embeddings_.has_value(); }
  const Matrix& embeddings() const override;

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
  std::unique_ptr<VocabularyTokenizer> tokenizer_;
  std::optional<Matrix> embeddings_;
};

struct ServeModelOptions {
  bool expose_gradients = true;
  bool expose_embeddings = true;
};

/// Registers the wire contract above on `server`, backed by `model`.
void serve_model(httplib::Server& server, std::shared_ptr<const ModelAdapter> model,
                 ServeModelOptions options = {});

}  // namespace qms::eval
