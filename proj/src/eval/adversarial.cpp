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

#include "qms/eval/adversarial.hpp"

#include "qms/common/error.hpp"

#include <random>

namespace qms::eval {

TokenId nearest_token(const Matrix& embeddings, const Vector& point,
                      std::span<const TokenId> candidates, std::uint64_t& tie_break) {
  std::vector<TokenId> best;
  double best_dist = 0.0;
  for (TokenId c : candidates) {
    const double dist = (embeddings.row(c).transpose() - point).squaredNorm();
    if (best.empty() || dist < best_dist) {
      best = {c};
      best_dist = dist;
    } else if (dist == best_dist) {
      best.push_back(c);
    }
  }
  if (best.size() == 1) return best.front();
  std::mt19937_64 rng(tie_break++);
  return best[std::uniform_int_distribution<std::size_t>(0, best.size() - 1)(rng)];
}

AdversarialResult adversarial_attack(const ModelAdapter& model, std::string_view prompt,
                                     const AdversarialOptions& options) {
  if (!(options.step_size > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "adversarial step size must be positive");
  }
  if (options.max_iterations < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_iterations must be >= 0");
  }
  if (!model.supports_gradients() || !model.has_embeddings()) {
    throw Error(ErrorCode::kUnsupported,
                "adversarial modification requires input gradients and embeddings");
  }
  const auto seq = model.tokenize(prompt);
  if (seq.tokens.empty()) throw Error(ErrorCode::kInvalidArgument, "prompt has no tokens");

  const Matrix& vocab = model.embeddings();
  std::vector<TokenId> candidates;
  const auto& tok = model.tokenizer();
  for (TokenId t = 0; t < static_cast<TokenId>(vocab.rows()); ++t) {
    if (t != tok.bos() && t != tok.eos()) candidates.push_back(t);
  }

  const auto truth_tokens = model.generate(seq.tokens, options.max_new_tokens);
  AdversarialResult result;
  result.ground_truth_output = render_output(model, truth_tokens);
  result.adversarial_output = result.ground_truth_output;
  result.perturbed_input = model.detokenize(seq.tokens);
  result.step_size = options.step_size;
  result.max_iterations = options.max_iterations;

  Matrix current(static_cast<Eigen::Index>(seq.tokens.size()), vocab.cols());
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    current.row(static_cast<Eigen::Index>(i)) = vocab.row(seq.tokens[i]);
  }
  std::vector<TokenId> discrete = seq.tokens;
  std::uint64_t tie_break = options.seed;

  for (int it = 1; it <= options.max_iterations; ++it) {
    const Matrix grad = model.accepts_embeddings()
                            ? model.embedding_gradient(current, truth_tokens)
                            : model.input_gradient(discrete, truth_tokens);
    const double norm = grad.norm();
    if (norm == 0.0) {
      // Stationary point: the remaining iterations cannot move the input.
      result.iterations = options.max_iterations;
      return result;
    }
    current += (options.step_size / norm) * grad;

    for (Eigen::Index i = 0; i < current.rows(); ++i) {
      discrete[static_cast<std::size_t>(i)] =
          nearest_token(vocab, current.row(i).transpose(), candidates, tie_break);
    }
    const auto output = render_output(model, model.generate(discrete, options.max_new_tokens));
    result.iterations = it;
    result.perturbed_input = model.detokenize(discrete);
    result.adversarial_output = output;
    if (output != result.ground_truth_output) {
      result.fooled = true;
      return result;
    }
  }
  return result;
}

void to_json(nlohmann::json& j, const AdversarialResult& r) {
  j = {{"ground_truth_output", r.ground_truth_output},
       {"adversarial_output", r.adversarial_output},
       {"perturbed_input", r.perturbed_input},
       {"iterations", r.iterations},
       {"fooled", r.fooled},
       {"step_size", r.step_size},
       {"max_iterations", r.max_iterations}};
}

}  // namespace qms::eval
