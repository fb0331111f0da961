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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qms::eval {

struct AdversarialOptions {
  double step_size = 0.05;  // epsilon
  int max_iterations = 50;
  int max_new_tokens = 64;
  std::uint64_t seed = 0;  // only breaks nearest-neighbour ties
};

struct AdversarialResult {
  std::string ground_truth_output;
  std::string adversarial_output;
  std::string perturbed_input;
  int iterations = 0;
  bool fooled = false;
  double step_size = 0.0;
  int max_iterations = 0;
};

/// Gradient-ascent attack on the prompt embeddings:
///
///   e <- e + eps * g / ||g||_F,   g = dL/de, L = NLL of the original output
///
/// followed by projecting every row onto its nearest vocabulary embedding
/// and regenerating. Stops as soon as the greedy output text changes.
/// The continuous embeddings accumulate across iterations; only the
/// projection is discrete. <bos> and <eos> are never projection targets.
AdversarialResult adversarial_attack(const ModelAdapter& model, std::string_view prompt,
                                     const AdversarialOptions& options = {});

/// Index of the nearest row of `embeddings` among `candidates` (Euclidean);
/// exact ties are broken uniformly by `tie_break`.
TokenId nearest_token(const Matrix& embeddings, const Vector& point,
                      std::span<const TokenId> candidates, std::uint64_t& tie_break);

void to_json(nlohmann::json& j, const AdversarialResult& r);

}  // namespace qms::eval
