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

#include "qms/eval/tokenizer.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qms::eval {

using TokenId = std::int32_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::string_view kBosToken = "<bos>";
inline constexpr std::string_view kEosToken = "<eos>";
inline constexpr std::string_view kUnkToken = "<unk>";

struct TokenSequence {
  std::vector<TokenId> tokens;
  std::string surface;
  /// Per-token location in `surface`; ascending and non-overlapping.
  std::vector<TextSpan> offsets;
};

/// Word-level tokenizer over a fixed vocabulary. Words are normalized as in
/// split_words(); out-of-vocabulary words map to `<unk>`. The special tokens
/// round-trip through their literal spelling.
class VocabularyTokenizer {
 public:
  explicit VocabularyTokenizer(std::vector<std::string> vocabulary);

  TokenSequence tokenize(std::string_view text) const;
  std::string detokenize(std::span<const TokenId> tokens) const;

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  std::optional<TokenId> find(std::string_view word) const;
  std::optional<TokenId> bos() const { return bos_; }
  std::optional<TokenId> eos() const { return eos_; }
  std::optional<TokenId> unk() const { return unk_; }

 private:
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, TokenId> index_;
  std::optional<TokenId> bos_, eos_, unk_;
};

/// Contract every evaluated language model satisfies. Gradient and
/// embedding surfaces are optional; metrics needing them raise
/// ErrorCode::kUnsupported when a model lacks them.
class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;

  virtual const VocabularyTokenizer& tokenizer() const = 0;

  const std::vector<std::string>& vocabulary() const { return tokenizer().vocabulary(); }
  TokenSequence tokenize(std::string_view text) const { return tokenizer().tokenize(text); }
  std::string detokenize(std::span<const TokenId> tokens) const {
    return tokenizer().detokenize(tokens);
  }

  /// Next-token logits after `context` (the whole prefix; models may truncate).
  virtual Vector logits(std::span<const TokenId> context) const = 0;

  /// Greedy continuation of `prompt`. Includes the end token when the model
  /// emits one; never longer than `max_new_tokens`.
  virtual std::vector<TokenId> generate(std::span<const TokenId> prompt,
                                        int max_new_tokens) const = 0;

  virtual bool supports_gradients() const { return false; }

  /// dL/de_i for every prompt row, L = sum_t -log p(target_t | prompt, target_<t).
  /// Shape: prompt.size() x embedding_dim.
  virtual Matrix input_gradient(std::span<const TokenId> prompt,
                                std::span<const TokenId> target) const;

  virtual bool has_embeddings() const { return false; }
  /// |V| x d embedding matrix.
  virtual const Matrix& embeddings() const;

  /// Continuous-input surface: the prompt given directly as embedding rows.
  virtual bool accepts_embeddings() const { return false; }
  virtual double embedding_loss(const Matrix& prompt_rows, std::span<const TokenId> target) const;
  virtual Matrix embedding_gradient(const Matrix& prompt_rows,
                                    std::span<const TokenId> target) const;
};

Vector softmax(const Vector& logits);
Vector log_softmax(const Vector& logits);

/// L = sum_t -log p(target_t | prompt, target_<t), from logits().
double sequence_nll(const ModelAdapter& model, std::span<const TokenId> prompt,
                    std::span<const TokenId> target);

/// Generated tokens rendered as text, with a trailing end token dropped.
std::string render_output(const ModelAdapter& model, std::span<const TokenId> generated);

}  // namespace qms::eval
