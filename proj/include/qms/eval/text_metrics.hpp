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

#include <span>
#include <string>
#include <string_view>

namespace qms::eval {

/// Positional token agreement: matches at i < min(|c|, |r|) divided by
/// max(|c|, |r|). Both empty scores 1.0.
double accuracy_score(std::span<const std::string> candidate, std::span<const std::string> reference);
double accuracy_score(std::string_view candidate, std::string_view reference);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// ROUGE-n with clipped multiset n-gram counts. Identical token sequences
/// score (1, 1, 1); otherwise a side without n-grams scores all zeros.
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   int n);
RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n);

/// Harmonic mean, 0 when precision + recall == 0.
double f1_score(double precision, double recall);

}  // namespace qms::eval
