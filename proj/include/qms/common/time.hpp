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

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace qms {

using Timestamp = std::chrono::system_clock::time_point;

/// Injectable wall clock; tests substitute a controllable one.
using Clock = std::function<Timestamp()>;

Clock system_clock();

/// UTC ISO-8601 with microsecond precision, e.g. `2024-07-30T12:00:00.000001Z`.
/// Lexicographic order of the output matches chronological order.
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view text);

}  // namespace qms
