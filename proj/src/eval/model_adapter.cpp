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

#include "qms/eval/model_adapter.hpp"

#include "qms/common/error.hpp"

#include <cmath>
#include <limits>

namespace qms::eval {

VocabularyTokenizer::VocabularyTokenizer(std::vector<std::string> vocabulary)
    : vocabulary_(std::move(vocabulary)) {
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    const auto id = static_cast<TokenId>(i);
    if (!index_.emplace(vocabulary_[i], id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate vocabulary entry '" + vocabulary_[i] + "'");
    }
    if (vocabulary_[i] == kBosToken) bos_ = id;
    if (vocabulary_[i] == kEosToken) eos_ = id;
    if (vocabulary_[i] == kUnkToken) unk_ = id;
  }
}

std::optional<TokenId> VocabularyTokenizer::find(std::string_view word) const {
  if (auto it = index_.find(std::string(word)); it != index_.end()) return it->second;
  return std::nullopt;
}

TokenSequence VocabularyTokenizer::tokenize(std::string_view text) const {
  TokenSequence seq;
  seq.surface = std::string(text);
  for (auto& word : split_words(text)) {
    std::optional<TokenId> id;
    // "<unk>" and friends lose their brackets to edge stripping; restore them.
    if (word.span.begin > 0 && word.span.end < text.size() && text[word.span.begin - 1] == '<' &&
        text[word.span.end] == '>') {
      const auto literal = "<" + word.text + ">";
      if (literal == kBosToken || literal == kEosToken || literal == kUnkToken) {
        id = find(literal);
        if (id) word.span = {word.span.begin - 1, word.span.end + 1};
      }
    }
    if (!id) id = find(word.text);
    if (!id) id = unk_;
    if (!id) {
      throw Error(ErrorCode::kInvalidArgument,
                  "word '" + word.text + "' not in vocabulary and no <unk> token");
    }
    seq.tokens.push_back(*id);
    seq.offsets.push_back(word.span);
  }
  return seq;
}

std::string VocabularyTokenizer::detokenize(std::span<const TokenId> tokens) const {
  std::string out;
  for (TokenId t : tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= vocabulary_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "token id out of range: " + std::to_string(t));
    }
    if (!out.empty()) out += ' ';
    out += vocabulary_[static_cast<std::size_t>(t)];
  }
  return out;
}

Matrix ModelAdapter::input_gradient(std::span<const TokenId>, std::span<const TokenId>) const {
  throw Error(ErrorCode::kUnsupported, "model does not provide input gradients");
}

const Matrix& ModelAdapter::embeddings() const {
  throw Error(ErrorCode::kUnsupported, "model does not expose its embedding matrix");
}

double ModelAdapter::embedding_loss(const Matrix&, std::span<const TokenId>) const {
  throw Error(ErrorCode::kUnsupported, "model does not accept embedding inputs");
}

Matrix ModelAdapter::embedding_gradient(const Matrix&, std::span<const TokenId>) const {
  throw Error(ErrorCode::kUnsupported, "model does not accept embedding inputs");
}

Vector softmax(const Vector& logits) {
  const double max = logits.maxCoeff();
  Vector p = (logits.array() - max).exp();
  return p / p.sum();
}

Vector log_softmax(const Vector& logits) {
  const double max = logits.maxCoeff();
  const double lse = max + std::log((logits.array() - max).exp().sum());
  return logits.array() - lse;
}

double sequence_nll(const ModelAdapter& model, std::span<const TokenId> prompt,
                    std::span<const TokenId> target) {
  std::vector<TokenId> context(prompt.begin(), prompt.end());
  double nll = 0.0;
  for (TokenId t : target) {
    const Vector lp = log_softmax(model.logits(context));
    nll -= lp(t);
    context.push_back(t);
  }
  return nll;
}

std::string render_output(const ModelAdapter& model, std::span<const TokenId> generated) {
  const auto eos = model.tokenizer().eos();
  if (eos && !generated.empty() && generated.back() == *eos) {
    generated = generated.first(generated.size() - 1);
  }
  return model.detokenize(generated);
}

}  // namespace qms::eval
