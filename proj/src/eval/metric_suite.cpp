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

#include "qms/eval/metric_suite.hpp"

#include "qms/common/error.hpp"
#include "qms/eval/adversarial.hpp"
#include "qms/eval/perplexity.hpp"
#include "qms/eval/saliency.hpp"
#include "qms/eval/text_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qms::eval {

void to_json(nlohmann::json& j, const VerificationPair& p) {
  j = {{"input", p.input}, {"expected_output", p.expected_output}};
}

void from_json(const nlohmann::json& j, VerificationPair& p) {
  p.input = j.at("input").get<std::string>();
  p.expected_output = j.at("expected_output").get<std::string>();
}

void MetricParams::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be a positive finite number");
  }
  if (rouge_n < 1) throw Error(ErrorCode::kInvalidArgument, "rouge_n must be >= 1");
  if (max_iterations < 0) throw Error(ErrorCode::kInvalidArgument, "max_iterations must be >= 0");
  if (max_new_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_new_tokens must be >= 1");
}

void to_json(nlohmann::json& j, const MetricParams& p) {
  j = {{"epsilon", p.epsilon},
       {"max_iterations", p.max_iterations},
       {"rouge_n", p.rouge_n},
       {"max_new_tokens", p.max_new_tokens},
       {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, MetricParams& p) {
  p.epsilon = j.value("epsilon", p.epsilon);
  p.max_iterations = j.value("max_iterations", p.max_iterations);
  p.rouge_n = j.value("rouge_n", p.rouge_n);
  p.max_new_tokens = j.value("max_new_tokens", p.max_new_tokens);
  p.seed = j.value("seed", p.seed);
}

nlohmann::json encode_real(double value) {
  if (std::isfinite(value)) return value;
  if (std::isnan(value)) return nullptr;
  return value > 0 ? "Infinity" : "-Infinity";
}

double decode_real(const nlohmann::json& value) {
  if (value.is_number()) return value.get<double>();
  if (value == "Infinity") return std::numeric_limits<double>::infinity();
  if (value == "-Infinity") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

std::string greedy_answer(const ModelAdapter& model, const std::string& input, int max_new_tokens) {
  const auto prompt = model.tokenize(input);
  return render_output(model, model.generate(prompt.tokens, max_new_tokens));
}

class AccuracyMetric final : public Metric {
 public:
  std::string name() const override { return "accuracy"; }
  std::string category() const override { return "performance"; }
  nlohmann::json evaluate(const ModelAdapter& model, std::span<const VerificationPair> pairs,
                          const MetricParams& params) const override {
    double sum = 0.0;
    for (const auto& p : pairs) {
      sum += accuracy_score(greedy_answer(model, p.input, params.max_new_tokens), p.expected_output);
    }
    return sum / static_cast<double>(pairs.size());
  }
};

class RougeMetric final : public Metric {
 public:
  std::string name() const override { return "rouge"; }
  std::string category() const override { return "performance"; }
  nlohmann::json evaluate(const ModelAdapter& model, std::span<const VerificationPair> pairs,
                          const MetricParams& params) const override {
    std::vector<RougeScore> sums(static_cast<std::size_t>(params.rouge_n));
    for (const auto& p : pairs) {
      const auto answer = greedy_answer(model, p.input, params.max_new_tokens);
      for (int n = 1; n <= params.rouge_n; ++n) {
        const auto s = rouge_n(answer, p.expected_output, n);
        auto& acc = sums[static_cast<std::size_t>(n - 1)];
        acc.precision += s.precision;
        acc.recall += s.recall;
        acc.f1 += s.f1;
      }
    }
    const auto count = static_cast<double>(pairs.size());
    nlohmann::json out = nlohmann::json::object();
    for (int n = 1; n <= params.rouge_n; ++n) {
      const auto& s = sums[static_cast<std::size_t>(n - 1)];
      out[std::to_string(n)] = {
          {"precision", s.precision / count}, {"recall", s.recall / count}, {"f1", s.f1 / count}};
    }
    return out;
  }
};

class PerplexityMetric final : public Metric {
 public:
  std::string name() const override { return "perplexity"; }
  std::string category() const override { return "performance"; }
  nlohmann::json evaluate(const ModelAdapter& model, std::span<const VerificationPair> pairs,
                          const MetricParams&) const override {
    double sum = 0.0;
    for (const auto& p : pairs) sum += perplexity(model, p.expected_output);
    return encode_real(sum / static_cast<double>(pairs.size()));
  }
};

class SaliencyMetric final : public Metric {
 public:
  std::string name() const override { return "saliency"; }
  std::string category() const override { return "explainability"; }
  nlohmann::json evaluate(const ModelAdapter& model, std::span<const VerificationPair> pairs,
                          const MetricParams& params) const override {
    auto out = nlohmann::json::array();
    for (const auto& p : pairs) {
      nlohmann::json entry = saliency_map(model, p.input, params.max_new_tokens);
      entry["input"] = p.input;
      out.push_back(std::move(entry));
    }
    return out;
  }
};

class AdversarialMetric final : public Metric {
 public:
  std::string name() const override { return "adversarial"; }
  std::string category() const override { return "consistency"; }
  nlohmann::json evaluate(const ModelAdapter& model, std::span<const VerificationPair> pairs,
                          const MetricParams& params) const override {
    const AdversarialOptions options{params.epsilon, params.max_iterations, params.max_new_tokens,
                                     params.seed};
    auto out = nlohmann::json::array();
    for (const auto& p : pairs) {
      nlohmann::json entry = adversarial_attack(model, p.input, options);
      entry["input"] = p.input;
      out.push_back(std::move(entry));
    }
    return out;
  }
};

}  // namespace

MetricRegistry MetricRegistry::with_builtin_metrics() {
  MetricRegistry r;
  r.add(std::make_shared<AccuracyMetric>());
  r.add(std::make_shared<RougeMetric>());
  r.add(std::make_shared<PerplexityMetric>());
  r.add(std::make_shared<SaliencyMetric>());
  r.add(std::make_shared<AdversarialMetric>());
  return r;
}

void MetricRegistry::add(std::shared_ptr<const Metric> metric) {
  auto name = metric->name();
  if (!metrics_.emplace(name, std::move(metric)).second) {
    throw Error(ErrorCode::kConflict, "metric '" + name + "' already registered");
  }
}

const Metric* MetricRegistry::find(std::string_view name) const {
  auto it = metrics_.find(name);
  return it == metrics_.end() ? nullptr : it->second.get();
}

std::vector<std::string> MetricRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, m] : metrics_) out.push_back(name);
  return out;
}

nlohmann::json run_metric_suite(const ModelAdapter& model, std::span<const VerificationPair> pairs,
                                std::span<const std::string> selection, const MetricParams& params,
                                const MetricRegistry& registry, const ProgressFn& progress) {
  if (selection.empty()) throw Error(ErrorCode::kInvalidArgument, "no metrics selected");
  if (pairs.empty()) throw Error(ErrorCode::kInvalidArgument, "verification dataset is empty");
  params.validate();

  std::vector<std::string> unique;
  for (const auto& name : selection) {
    if (std::find(unique.begin(), unique.end(), name) == unique.end()) unique.push_back(name);
  }
  auto results = nlohmann::json::object();
  std::size_t done = 0;
  for (const auto& name : unique) {
    const Metric* metric = registry.find(name);
    nlohmann::json entry;
    if (!metric) {
      entry = {{"status", "failed"},
               {"category", "unknown"},
               {"error", {{"code", "invalid_argument"}, {"message", "unknown metric '" + name + "'"}}}};
    } else {
      entry["category"] = metric->category();
      try {
        entry["value"] = metric->evaluate(model, pairs, params);
        entry["status"] = "ok";
      } catch (const Error& e) {
        entry["status"] = "failed";
        entry["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
      } catch (const std::exception& e) {
        entry["status"] = "failed";
        entry["error"] = {{"code", "internal"}, {"message", e.what()}};
      }
    }
    results[name] = std::move(entry);
    if (progress) progress(++done, unique.size());
  }
  return results;
}

}  // namespace qms::eval
