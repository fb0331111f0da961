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

#include <functional>
#include <string>
#include <vector>

namespace qms::testing {

/// Test model whose logits come from an arbitrary function of the context.
class TableModel final : public eval::ModelAdapter {
 public:
  using LogitFn = std::function<eval::Vector(std::span<const eval::TokenId>)>;

  TableModel(std::vector<std::string> vocabulary, LogitFn fn)
      : tokenizer_(std::move(vocabulary)), fn_(std::move(fn)) {}

  const eval::VocabularyTokenizer& tokenizer() const override { return tokenizer_; }
  eval::Vector logits(std::span<const eval::TokenId> context) const override { return fn_(context); }
  std::vector<eval::TokenId> generate(std::span<const eval::TokenId> prompt,
                                      int max_new_tokens) const override {
    std::vector<eval::TokenId> seq(prompt.begin(), prompt.end()), out;
    for (int i = 0; i < max_new_tokens; ++i) {
      eval::Vector z = fn_(seq);
      Eigen::Index best;
      z.maxCoeff(&best);
      out.push_back(static_cast<eval::TokenId>(best));
      if (tokenizer_.eos() && best == *tokenizer_.eos()) break;
      seq.push_back(static_cast<eval::TokenId>(best));
    }
    return out;
  }

 private:
  eval::VocabularyTokenizer tokenizer_;
  LogitFn fn_;
};

}  // namespace qms::testing
