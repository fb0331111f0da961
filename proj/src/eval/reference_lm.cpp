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

#include "qms/eval/reference_lm.hpp"

#include "qms/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

namespace qms::eval {
namespace {

std::vector<std::vector<std::string>> corpus_lines(std::string_view corpus) {
  std::vector<std::vector<std::string>> lines;
  std::size_t pos = 0;
  while (pos < corpus.size()) {
    auto eol = corpus.find('\n', pos);
    if (eol == std::string_view::npos) eol = corpus.size();
    auto words = normalize_words(corpus.substr(pos, eol - pos));
    if (!words.empty()) lines.push_back(std::move(words));
    pos = eol + 1;
  }
  return lines;
}

// One training example: a context window (slot 0 oldest) and its target.
struct Position {
  std::vector<TokenId> context;
  TokenId target;
};

std::vector<Position> positions_for(const VocabularyTokenizer& tok, int context_length,
                                    const std::vector<std::vector<std::string>>& lines) {
  std::vector<Position> out;
  const TokenId bos = *tok.bos();
  const TokenId eos = *tok.eos();
  const TokenId unk = *tok.unk();
  for (const auto& line : lines) {
    std::vector<TokenId> seq(static_cast<std::size_t>(context_length), bos);
    for (const auto& w : line) seq.push_back(tok.find(w).value_or(unk));
    seq.push_back(eos);
    for (std::size_t i = static_cast<std::size_t>(context_length); i < seq.size(); ++i) {
      out.push_back({std::vector<TokenId>(seq.begin() + static_cast<long>(i) - context_length,
                                          seq.begin() + static_cast<long>(i)),
                     seq[i]});
    }
  }
  return out;
}

double mean_nll_over(const ReferenceLm& model, const std::vector<Position>& positions) {
  if (positions.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : positions) total -= log_softmax(model.logits(p.context))(p.target);
  return total / static_cast<double>(positions.size());
}

}  // namespace

std::string corpus_digest(std::string_view corpus) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : corpus) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ReferenceLm::ReferenceLm(std::vector<std::string> vocabulary, Matrix embeddings,
                         std::vector<Matrix> context_weights, Vector bias, std::string digest)
    : tokenizer_(std::move(vocabulary)),
      embeddings_(std::move(embeddings)),
      context_weights_(std::move(context_weights)),
      bias_(std::move(bias)),
      corpus_digest_(std::move(digest)) {
  const auto v = static_cast<Eigen::Index>(tokenizer_.vocabulary().size());
  const auto d = embeddings_.cols();
  if (!tokenizer_.bos() || !tokenizer_.eos() || !tokenizer_.unk()) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary must contain <bos>, <eos> and <unk>");
  }
  if (embeddings_.rows() != v || bias_.size() != v || d < 1 || context_weights_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "inconsistent reference model shapes");
  }
  for (const auto& c : context_weights_) {
    if (c.rows() != d || c.cols() != d) {
      throw Error(ErrorCode::kInvalidArgument, "context weight must be d x d");
    }
  }
}

ReferenceLm ReferenceLm::initialize(std::string_view corpus, const ReferenceLmOptions& options) {
  if (options.embedding_dim < 2) throw Error(ErrorCode::kInvalidArgument, "embedding_dim must be >= 2");
  if (options.context_length < 1) throw Error(ErrorCode::kInvalidArgument, "context_length must be >= 1");
  const auto lines = corpus_lines(corpus);
  std::set<std::string> distinct;
  std::size_t words = 0;
  for (const auto& line : lines) {
    words += line.size();
    distinct.insert(line.begin(), line.end());
  }
  if (words < 50) {
    throw Error(ErrorCode::kInvalidArgument,
                "corpus has " + std::to_string(words) + " words; at least 50 required");
  }
  if (distinct.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "degenerate corpus: fewer than 2 distinct words");
  }
  std::vector<std::string> vocab{std::string(kBosToken), std::string(kEosToken),
                                 std::string(kUnkToken)};
  for (const auto& w : distinct) {
    if (w != kBosToken && w != kEosToken && w != kUnkToken) vocab.push_back(w);
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, options.init_scale);
  const auto v = static_cast<Eigen::Index>(vocab.size());
  const auto d = static_cast<Eigen::Index>(options.embedding_dim);
  Matrix e(v, d);
  for (Eigen::Index i = 0; i < v; ++i)
    for (Eigen::Index k = 0; k < d; ++k) e(i, k) = normal(rng);
  std::vector<Matrix> c;
  for (int j = 0; j < options.context_length; ++j) {
    Matrix cj(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index k = 0; k < d; ++k) cj(r, k) = normal(rng);
    c.push_back(std::move(cj));
  }
  return ReferenceLm(std::move(vocab), std::move(e), std::move(c), Vector::Zero(v),
                     eval::corpus_digest(corpus));
}

std::pair<ReferenceLm, TrainingReport> ReferenceLm::train(std::string_view corpus,
                                                          const ReferenceLmOptions& options) {
  if (options.epochs < 0) throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 0");
  if (!(options.learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be positive");
  }
  ReferenceLm model = initialize(corpus, options);
  auto positions = positions_for(model.tokenizer_, options.context_length, corpus_lines(corpus));

  TrainingReport report;
  report.positions = positions.size();
  report.epochs = options.epochs;
  report.initial_nll = mean_nll_over(model, positions);

  // Separate stream from initialization so epochs don't perturb init draws.
  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(positions.size());
  const double lr = options.learning_rate;
  auto& E = model.embeddings_;
  auto& C = model.context_weights_;
  auto& b = model.bias_;
  const int m = options.context_length;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const auto& pos = positions[idx];
      Vector h = Vector::Zero(E.cols());
      for (int j = 0; j < m; ++j) h.noalias() += C[j] * E.row(pos.context[j]).transpose();
      Vector delta = softmax(E * h + b);
      delta(pos.target) -= 1.0;

      const Vector grad_h = E.transpose() * delta;
      std::vector<Vector> grad_rows;
      std::vector<Matrix> grad_c;
      for (int j = 0; j < m; ++j) {
        grad_rows.push_back(C[j].transpose() * grad_h);
        grad_c.push_back(grad_h * E.row(pos.context[j]));
      }
      b -= lr * delta;
      E.noalias() -= lr * delta * h.transpose();
      for (int j = 0; j < m; ++j) {
        E.row(pos.context[j]) -= lr * grad_rows[j].transpose();
        C[j] -= lr * grad_c[j];
      }
    }
  }
  report.final_nll = mean_nll_over(model, positions);
  return {std::move(model), report};
}

double ReferenceLm::mean_nll(std::string_view corpus) const {
  return mean_nll_over(*this, positions_for(tokenizer_, context_length(), corpus_lines(corpus)));
}

std::size_t ReferenceLm::parameter_count() const {
  std::size_t n = static_cast<std::size_t>(embeddings_.size() + bias_.size());
  for (const auto& c : context_weights_) n += static_cast<std::size_t>(c.size());
  return n;
}

std::vector<TokenId> ReferenceLm::window(std::span<const TokenId> prefix) const {
  const auto m = static_cast<std::size_t>(context_length());
  std::vector<TokenId> w(m, *tokenizer_.bos());
  const std::size_t take = std::min(m, prefix.size());
  std::copy(prefix.end() - static_cast<long>(take), prefix.end(), w.end() - static_cast<long>(take));
  return w;
}

Vector ReferenceLm::hidden(const std::vector<Vector>& rows) const {
  Vector h = Vector::Zero(embeddings_.cols());
  for (std::size_t j = 0; j < rows.size(); ++j) h.noalias() += context_weights_[j] * rows[j];
  return h;
}

Vector ReferenceLm::logits(std::span<const TokenId> context) const {
  const auto vocab = static_cast<TokenId>(embeddings_.rows());
  std::vector<Vector> rows;
  for (TokenId t : window(context)) {
    if (t < 0 || t >= vocab) throw Error(ErrorCode::kInvalidArgument, "token id out of range");
    rows.push_back(embeddings_.row(t).transpose());
  }
  return embeddings_ * hidden(rows) + bias_;
}

std::vector<TokenId> ReferenceLm::generate(std::span<const TokenId> prompt,
                                           int max_new_tokens) const {
  std::vector<TokenId> seq(prompt.begin(), prompt.end());
  std::vector<TokenId> out;
  const TokenId bos = *tokenizer_.bos();
  const TokenId eos = *tokenizer_.eos();
  for (int i = 0; i < max_new_tokens; ++i) {
    const Vector z = logits(seq);
    TokenId best = -1;
    for (Eigen::Index w = 0; w < z.size(); ++w) {
      if (w == bos) continue;
      if (best < 0 || z(w) > z(best)) best = static_cast<TokenId>(w);
    }
    out.push_back(best);
    if (best == eos) break;
    seq.push_back(best);
  }
  return out;
}

std::vector<Vector> ReferenceLm::window_rows(const Matrix& prompt_rows,
                                             std::span<const TokenId> target, std::size_t step,
                                             std::vector<long>* prompt_index) const {
  // Slot j holds sequence position P + step - m + j: negative is <bos>,
  // below P a (continuous) prompt row, otherwise an earlier target token.
  const long p = prompt_rows.rows();
  const int m = context_length();
  std::vector<Vector> rows;
  for (int j = 0; j < m; ++j) {
    const long pos = p + static_cast<long>(step) - m + j;
    if (prompt_index) prompt_index->push_back(pos >= 0 && pos < p ? pos : -1);
    if (pos < 0) {
      rows.push_back(embeddings_.row(*tokenizer_.bos()).transpose());
    } else if (pos < p) {
      rows.push_back(prompt_rows.row(pos).transpose());
    } else {
      rows.push_back(embeddings_.row(target[static_cast<std::size_t>(pos - p)]).transpose());
    }
  }
  return rows;
}

double ReferenceLm::embedding_loss(const Matrix& prompt_rows,
                                   std::span<const TokenId> target) const {
  double loss = 0.0;
  for (std::size_t t = 0; t < target.size(); ++t) {
    const auto rows = window_rows(prompt_rows, target, t, nullptr);
    loss -= log_softmax(embeddings_ * hidden(rows) + bias_)(target[t]);
  }
  return loss;
}

Matrix ReferenceLm::embedding_gradient(const Matrix& prompt_rows,
                                       std::span<const TokenId> target) const {
  Matrix grad = Matrix::Zero(prompt_rows.rows(), embeddings_.cols());
  for (std::size_t t = 0; t < target.size(); ++t) {
    std::vector<long> prompt_index;
    const auto rows = window_rows(prompt_rows, target, t, &prompt_index);
    Vector delta = softmax(embeddings_ * hidden(rows) + bias_);
    delta(target[t]) -= 1.0;
    const Vector grad_h = embeddings_.transpose() * delta;
    for (std::size_t j = 0; j < prompt_index.size(); ++j) {
      if (prompt_index[j] >= 0) {
        grad.row(prompt_index[j]) += (context_weights_[j].transpose() * grad_h).transpose();
      }
    }
  }
  return grad;
}

Matrix ReferenceLm::input_gradient(std::span<const TokenId> prompt,
                                   std::span<const TokenId> target) const {
  Matrix rows(static_cast<Eigen::Index>(prompt.size()), embeddings_.cols());
  for (std::size_t i = 0; i < prompt.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = embeddings_.row(prompt[i]);
  return embedding_gradient(rows, target);
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::kInvalidArgument, "ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

}  // namespace

nlohmann::json ReferenceLm::to_json() const {
  nlohmann::json c = nlohmann::json::array();
  for (const auto& cj : context_weights_) c.push_back(matrix_to_json(cj));
  return {{"kind", "reference_lm"},
          {"vocabulary", tokenizer_.vocabulary()},
          {"embeddings", matrix_to_json(embeddings_)},
          {"context_weights", std::move(c)},
          {"bias", std::vector<double>(bias_.data(), bias_.data() + bias_.size())},
          {"corpus_digest", corpus_digest_}};
}

ReferenceLm ReferenceLm::from_json(const nlohmann::json& j) {
  std::vector<Matrix> c;
  for (const auto& cj : j.at("context_weights")) c.push_back(matrix_from_json(cj));
  const auto bias = j.at("bias").get<std::vector<double>>();
  return ReferenceLm(j.at("vocabulary").get<std::vector<std::string>>(),
                     matrix_from_json(j.at("embeddings")), std::move(c),
                     Eigen::Map<const Vector>(bias.data(), static_cast<Eigen::Index>(bias.size())),
                     j.value("corpus_digest", ""));
}

}  // namespace qms::eval
