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

#include "qms/eval/text_metrics.hpp"

#include "qms/common/error.hpp"
#include "qms/eval/tokenizer.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace qms::eval {
namespace {

using NgramCounts = std::map<std::vector<std::string>, long>;

NgramCounts count_ngrams(std::span<const std::string> tokens, int n) {
  NgramCounts counts;
  const auto len = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + len <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<long>(i),
                                      tokens.begin() + static_cast<long>(i + len))];
  }
  return counts;
}

long total(const NgramCounts& counts) {
  long sum = 0;
  for (const auto& [gram, c] : counts) sum += c;
  return sum;
}

}  // namespace

double accuracy_score(std::span<const std::string> candidate, std::span<const std::string> reference) {
  const auto longest = std::max(candidate.size(), reference.size());
  if (longest == 0) return 1.0;
  const auto shortest = std::min(candidate.size(), reference.size());
  std::size_t matches = 0;
  for (std::size_t i = 0; i < shortest; ++i) {
    if (candidate[i] == reference[i]) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(longest);
}

double accuracy_score(std::string_view candidate, std::string_view reference) {
  const auto c = normalize_words(candidate);
  const auto r = normalize_words(reference);
  return accuracy_score(c, r);
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom == 0.0 ? 0.0 : 2.0 * precision * recall / denom;
}

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "rouge n must be >= 1");
  if (std::equal(candidate.begin(), candidate.end(), reference.begin(), reference.end())) {
    return {1.0, 1.0, 1.0};
  }
  const auto cand = count_ngrams(candidate, n);
  const auto ref = count_ngrams(reference, n);
  const long cand_total = total(cand);
  const long ref_total = total(ref);
  if (cand_total == 0 || ref_total == 0) return {};

  long overlap = 0;
  for (const auto& [gram, count] : cand) {
    if (auto it = ref.find(gram); it != ref.end()) overlap += std::min(count, it->second);
  }
  RougeScore s;
  s.precision = static_cast<double>(overlap) / static_cast<double>(cand_total);
  s.recall = static_cast<double>(overlap) / static_cast<double>(ref_total);
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n) {
  const auto c = normalize_words(candidate);
  const auto r = normalize_words(reference);
  return rouge_n(c, r, n);
}

}  // namespace qms::eval
