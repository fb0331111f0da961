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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qms::eval {

/// Half-open byte range into the source text.
struct TextSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const TextSpan&, const TextSpan&) = default;
};

struct Word {
  std::string text;  // normalized form
  TextSpan span;     // location of the unnormalized word in the source
};

/// Metric tokenization: split on Unicode whitespace, strip ASCII punctuation
/// from both ends of each piece, lowercase ASCII letters. Pieces that are
/// pure punctuation disappear.
std::vector<Word> split_words(std::string_view text);

/// Normalized words only.
std::vector<std::string> normalize_words(std::string_view text);

}  // namespace qms::eval
