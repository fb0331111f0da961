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

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qms::eval {

struct SaliencyToken {
  std::string text;  // surface form in the prompt
  TokenId token = 0;
  TextSpan span;
  double raw = 0.0;         // L2 norm of dL/de_i
  double normalized = 0.0;  // min-max scaled into [0, 1]
};

struct SaliencyMap {
  std::vector<SaliencyToken> tokens;
  std::string generated_output;
};

/// Min-max normalization; all 1.0 when every score is equal.
std::vector<double> normalize_scores(std::span<const double> raw);

/// Greedy-generates the model's own answer to `prompt`, then scores each
/// prompt token by the gradient norm of that answer's NLL with respect to
/// the token's embedding.
SaliencyMap saliency_map(const ModelAdapter& model, std::string_view prompt,
                         int max_new_tokens = 64);

void to_json(nlohmann::json& j, const SaliencyToken& t);
void to_json(nlohmann::json& j, const SaliencyMap& m);

}  // namespace qms::eval
