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

#include "qms/eval/memory_estimate.hpp"

#include "qms/common/error.hpp"

#include <limits>

namespace qms::eval {

std::optional<Precision> parse_precision(std::string_view text) {
  if (text == "fp32" || text == "float32") return Precision::kFloat32;
  if (text == "fp16" || text == "float16") return Precision::kFloat16;
  return std::nullopt;
}

int bytes_per_parameter(Precision p) { return p == Precision::kFloat32 ? 4 : 2; }

MemoryEstimate estimate_memory(std::uint64_t parameter_count, Precision precision,
                               bool with_gradients) {
  if (parameter_count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "parameter count must be positive");
  }
  MemoryEstimate e;
  e.parameter_count = parameter_count;
  e.bytes_per_parameter = bytes_per_parameter(precision);
  e.with_gradients = with_gradients;
  const std::uint64_t factor = static_cast<std::uint64_t>(e.bytes_per_parameter) * (with_gradients ? 2 : 1);
  if (parameter_count > std::numeric_limits<std::uint64_t>::max() / factor) {
    throw Error(ErrorCode::kInvalidArgument, "parameter count too large");
  }
  e.total_bytes = parameter_count * factor;
  return e;
}

}  // namespace qms::eval
