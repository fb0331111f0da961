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

#include "qms/eval/perplexity.hpp"

#include "qms/common/error.hpp"

#include <cmath>
#include <limits>

namespace qms::eval {

double perplexity(const ModelAdapter& model, std::span<const TokenId> tokens) {
  if (tokens.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "perplexity needs at least 2 tokens");
  }
  double nll = 0.0;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const double lp = log_softmax(model.logits(tokens.first(i)))(tokens[i]);
    if (std::isinf(lp)) return std::numeric_limits<double>::infinity();
    nll -= lp;
  }
  return std::exp(nll / static_cast<double>(tokens.size() - 1));
}

double perplexity(const ModelAdapter& model, std::string_view text) {
  const auto seq = model.tokenize(text);
  return perplexity(model, std::span<const TokenId>(seq.tokens));
}

}  // namespace qms::eval
