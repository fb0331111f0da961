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

#include <cstdint>
#include <optional>
#include <string_view>

namespace qms::eval {

enum class Precision { kFloat32, kFloat16 };

std::optional<Precision> parse_precision(std::string_view text);  // fp32|float32|fp16|float16
int bytes_per_parameter(Precision p);

/// Accelerator memory for one forward pass (and, optionally, the same
/// amount again for gradients) at batch size one.
struct MemoryEstimate {
  std::uint64_t parameter_count = 0;
  int bytes_per_parameter = 4;
  bool with_gradients = false;
  std::uint64_t total_bytes = 0;

  /// Decimal gigabytes (10^9 bytes).
  double gigabytes() const { return static_cast<double>(total_bytes) / 1e9; }
};

/// Throws kInvalidArgument for zero parameters or byte-count overflow.
MemoryEstimate estimate_memory(std::uint64_t parameter_count, Precision precision,
                               bool with_gradients);

}  // namespace qms::eval
