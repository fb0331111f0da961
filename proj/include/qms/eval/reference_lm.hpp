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
#include <utility>
#include <vector>

namespace qms::eval {

struct ReferenceLmOptions {
  int embedding_dim = 16;
  int context_length = 3;  // tokens of history (n - 1)
  int epochs = 40;
  double learning_rate = 0.05;
  std::uint64_t seed = 7;
  double init_scale = 0.1;
};

struct TrainingReport {
  double initial_nll = 0.0;  // mean per predicted token, before training
  double final_nll = 0.0;
  int epochs = 0;
  std::size_t positions = 0;
};

/// Log-bilinear n-gram language model:
///
///   logit_w(context) = (sum_j C_j e_{context_j}) . e_w + b_w
///
/// over the last `context_length` tokens (left-padded with `<bos>`). The
/// embedding matrix E is shared between inputs and outputs. Every
/// non-empty corpus line is one training sequence terminated by `<eos>`.
class ReferenceLm final : public ModelAdapter {
 public:
  ReferenceLm(std::vector<std::string> vocabulary, Matrix embeddings,
              std::vector<Matrix> context_weights, Vector bias, std::string corpus_digest = {});

  /// Vocabulary (specials first, then corpus words sorted) and seeded random
  /// parameters. Throws kInvalidArgument for corpora under 50 words or with
  /// fewer than 2 distinct words.
  static ReferenceLm initialize(std::string_view corpus, const ReferenceLmOptions& options);

  /// Per-position SGD over shuffled corpus positions; bit-identical for a
  /// fixed seed. epochs == 0 returns the initialization unchanged.
  static std::pair<ReferenceLm, TrainingReport> train(std::string_view corpus,
                                                      const ReferenceLmOptions& options);

  /// Mean negative log likelihood per predicted token over the corpus lines.
  double mean_nll(std::string_view corpus) const;

  int embedding_dim() const { return static_cast<int>(embeddings_.cols()); }
  int context_length() const { return static_cast<int>(context_weights_.size()); }
  const std::vector<Matrix>& context_weights() const { return context_weights_; }
  const Vector& bias() const { return bias_; }
  const std::string& corpus_digest() const { return corpus_digest_; }
  std::size_t parameter_count() const;

  nlohmann::json to_json() const;
  static ReferenceLm from_json(const nlohmann::json& j);

  // ModelAdapter
  const VocabularyTokenizer& tokenizer() const override { return tokenizer_; }
  Vector logits(std::span<const TokenId> context) const override;
  std::vector<TokenId> generate(std::span<const TokenId> prompt, int max_new_tokens) const override;
  bool supports_gradients() const override { return true; }
  Matrix input_gradient(std::span<const TokenId> prompt,
                        std::span<const TokenId> target) const override;
  bool has_embeddings() const override { return true; }
  const Matrix& embeddings() const override { return embeddings_; }
  bool accepts_embeddings() const override { return true; }
  double embedding_loss(const Matrix& prompt_rows, std::span<const TokenId> target) const override;
  Matrix embedding_gradient(const Matrix& prompt_rows,
                            std::span<const TokenId> target) const override;

 private:
  // Hidden state sum_j C_j x_j for a window whose slot j holds `rows[j]`.
  Vector hidden(const std::vector<Vector>& rows) const;
  std::vector<TokenId> window(std::span<const TokenId> prefix) const;
  std::vector<Vector> window_rows(const Matrix& prompt_rows, std::span<const TokenId> target,
                                  std::size_t step, std::vector<long>* prompt_index) const;

  VocabularyTokenizer tokenizer_;
  Matrix embeddings_;                   // |V| x d
  std::vector<Matrix> context_weights_;  // context_length x (d x d), slot 0 oldest
  Vector bias_;                          // |V|
  std::string corpus_digest_;
};

/// FNV-1a 64-bit digest of the corpus text, as `fnv1a64:<hex>`.
std::string corpus_digest(std::string_view corpus);

}  // namespace qms::eval
