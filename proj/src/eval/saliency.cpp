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

#include "qms/eval/saliency.hpp"

#include "qms/common/error.hpp"

#include <algorithm>

namespace qms::eval {

std::vector<double> normalize_scores(std::span<const double> raw) {
  if (raw.empty()) return {};
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double min = *lo, max = *hi;
  std::vector<double> out;
  out.reserve(raw.size());
  for (double s : raw) out.push_back(max == min ? 1.0 : (s - min) / (max - min));
  return out;
}

SaliencyMap saliency_map(const ModelAdapter& model, std::string_view prompt, int max_new_tokens) {
  if (!model.supports_gradients()) {
    throw Error(ErrorCode::kUnsupported, "saliency requires a model with input gradients");
  }
  if (max_new_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_new_tokens must be >= 1");
  const auto seq = model.tokenize(prompt);
  if (seq.tokens.empty()) throw Error(ErrorCode::kInvalidArgument, "prompt has no tokens");

  const auto target = model.generate(seq.tokens, max_new_tokens);
  const Matrix grad = model.input_gradient(seq.tokens, target);
  if (grad.rows() != static_cast<Eigen::Index>(seq.tokens.size())) {
    throw Error(ErrorCode::kInternal, "gradient row count does not match prompt length");
  }

  std::vector<double> raw;
  for (Eigen::Index i = 0; i < grad.rows(); ++i) raw.push_back(grad.row(i).norm());
  const auto norm = normalize_scores(raw);

  SaliencyMap map;
  map.generated_output = render_output(model, target);
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    const auto span = seq.offsets[i];
    map.tokens.push_back({seq.surface.substr(span.begin, span.end - span.begin), seq.tokens[i], span,
                          raw[i], norm[i]});
  }
  return map;
}

void to_json(nlohmann::json& j, const SaliencyToken& t) {
  j = {{"text", t.text},
       {"token", t.token},
       {"begin", t.span.begin},
       {"end", t.span.end},
       {"raw", t.raw},
       {"normalized", t.normalized}};
}

void to_json(nlohmann::json& j, const SaliencyMap& m) {
  j = {{"generated_output", m.generated_output}, {"tokens", m.tokens}};
}

}  // namespace qms::eval
