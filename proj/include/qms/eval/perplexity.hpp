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

#include <span>
#include <string_view>

namespace qms::eval {

/// exp(-(1/N) sum_{i=1..N} ln p(w_i | w_<i)) over N = |tokens| - 1 predicted
/// positions. Returns +infinity when some token has probability zero.
/// Throws kInvalidArgument for fewer than 2 tokens.
double perplexity(const ModelAdapter& model, std::span<const TokenId> tokens);
double perplexity(const ModelAdapter& model, std::string_view text);

}  // namespace qms::eval
