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

#include <string_view>

namespace qms::eval {

/// Small English corpus of process descriptions (one sentence per line)
/// used to train the built-in reference model.
std::string_view bundled_corpus();

/// Demo verification pair: actor/activity extraction from a process text.
std::string_view demo_prompt();
std::string_view demo_expected_output();

}  // namespace qms::eval
