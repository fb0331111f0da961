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

#include "qms/eval/model_adapter.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qms::eval {

struct VerificationPair {
  std::string input;
  std::string expected_output;
};

void to_json(nlohmann::json& j, const VerificationPair& p);
void from_json(const nlohmann::json& j, VerificationPair& p);

struct MetricParams {
  double epsilon = 0.05;
  int max_iterations = 50;
  int rouge_n = 2;  // ROUGE-1 .. ROUGE-rouge_n are reported
  int max_new_tokens = 64;
  std::uint64_t seed = 0;

  /// Throws kInvalidArgument for epsilon <= 0, rouge_n < 1, negative
  /// max_iterations or max_new_tokens < 1.
  void validate() const;
};

void to_json(nlohmann::json& j, const MetricParams& p);
/// Missing fields keep their defaults.
void from_json(const nlohmann::json& j, MetricParams& p);

/// One technical evaluation metric. Implementations are stateless and may be
/// run concurrently on a shared read-only model.
class Metric {
 public:
  virtual ~Metric() = default;
  virtual std::string name() const = 0;
  /// performance | explainability | consistency
  virtual std::string category() const = 0;
  virtual nlohmann::json evaluate(const ModelAdapter& model, std::span<const VerificationPair> pairs,
                                  const MetricParams& params) const = 0;
};

class MetricRegistry {
 public:
  /// accuracy, rouge, perplexity, saliency, adversarial.
  static MetricRegistry with_builtin_metrics();

  /// Throws kConflict when the name is taken.
  void add(std::shared_ptr<const Metric> metric);
  const Metric* find(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::shared_ptr<const Metric>, std::less<>> metrics_;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs exactly the selected metrics. Each entry of the returned object is
/// either {"status":"ok","category":…,"value":…} or
/// {"status":"failed","category":…,"error":{"code":…,"message":…}}; one
/// metric failing never prevents the others from running.
nlohmann::json run_metric_suite(const ModelAdapter& model, std::span<const VerificationPair> pairs,
                                std::span<const std::string> selection, const MetricParams& params,
                                const MetricRegistry& registry = MetricRegistry::with_builtin_metrics(),
                                const ProgressFn& progress = {});

/// Finite values as numbers, infinities as the strings "Infinity"/"-Infinity".
nlohmann::json encode_real(double value);
double decode_real(const nlohmann::json& value);

}  // namespace qms::eval
