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

#include "qms/common/time.hpp"
#include "qms/eval/model_adapter.hpp"
#include "qms/rms/job_runner.hpp"
#include "qms/rms/risk_classifier.hpp"
#include "qms/storage/document_store.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace qms::rms {

using Value = nlohmann::json;

/// Builds a private model instance from a stored `models` document body.
using ModelFactory = std::function<std::unique_ptr<eval::ModelAdapter>(const Value& model)>;

/// Built-in models are rebuilt from their stored parameters; http models
/// connect to their base_url.
ModelFactory default_model_factory();

struct RmsOptions {
  int max_running_jobs = 2;
};

/// The risk-management process:
///
///   1. component selection     register_model / list_models
///   2. risk identification     create_identification
///   3. verification data       create_dataset
///   4. risk analysis           start_analysis / get_job
///   5. risk assessment         assemble_assessment / list_assessments
///   6. risk mitigation         add_mitigation
///
/// Every object belongs to the user that created it. Reading another user's
/// object is kForbidden; a missing one is kNotFound. Methods return the
/// stored body with its `id` (and `created_at`) merged in.
class RmsService {
 public:
  RmsService(storage::DocumentStore& store, RiskClassifier classifier, RmsOptions options = {},
             Clock clock = system_clock(), ModelFactory factory = default_model_factory());
  ~RmsService();
  RmsService(const RmsService&) = delete;
  RmsService& operator=(const RmsService&) = delete;

  // Users, written by the auth service on signup. Idempotent.
  Value ensure_user(const std::string& user_id);
  /// {"user_id", "assessment_ids"}; kNotFound for unknown users.
  Value get_user(const std::string& user_id) const;
  std::vector<std::string> user_ids() const;

  /// {"name", "kind":"builtin", "training":{…}?, "corpus"?} trains a
  /// reference model; {"name", "kind":"http", "base_url", "parameter_count"?}
  /// records a remote one (probed for its vocabulary).
  Value register_model(const std::string& user_id, const Value& request);
  /// Model descriptor without the trained parameters.
  Value get_model(const std::string& user_id, const std::string& model_id) const;
  std::vector<Value> list_models(const std::string& user_id) const;

  /// {"model_id", "domain", "purpose", "capabilities", "ai_user",
  /// "ai_subject", "is_gpai", "training_flops"?}.
  Value create_identification(const std::string& user_id, const Value& request);
  Value get_identification(const std::string& user_id, const std::string& id) const;
  std::vector<Value> list_identifications(const std::string& user_id) const;

  /// {"name", "domain", "task", "pairs":[{"input","expected_output"}, …]}.
  Value create_dataset(const std::string& user_id, const Value& request);
  Value get_dataset(const std::string& user_id, const std::string& id) const;
  std::vector<Value> list_datasets(const std::string& user_id) const;

  /// {"model_id", "dataset_id", "metrics":[…], "params":{…}?}. Returns
  /// {"analysis_id", "job_id", "state":"Pending"}.
  Value start_analysis(const std::string& user_id, const Value& request);
  Value get_analysis(const std::string& user_id, const std::string& id) const;
  std::vector<Value> list_analyses(const std::string& user_id) const;
  /// Job state; includes the analysis results once Done.
  Value get_job(const std::string& user_id, const std::string& job_id) const;

  /// kFailedPrecondition unless the analysis is Done; kInvalidArgument when
  /// identification and analysis concern different models.
  Value assemble_assessment(const std::string& user_id, const std::string& identification_id,
                            const std::string& analysis_id);
  /// Includes `mitigation_ids` in creation order.
  Value get_assessment(const std::string& user_id, const std::string& id) const;
  std::vector<Value> list_assessments(const std::string& user_id) const;
  /// Assessment with its identification, analysis, model descriptor,
  /// dataset and mitigations embedded; the input for documentation.
  Value assessment_bundle(const std::string& user_id, const std::string& id) const;

  Value add_mitigation(const std::string& user_id, const std::string& assessment_id,
                       const std::string& description);
  std::vector<Value> list_mitigations(const std::string& user_id, const std::string& assessment_id) const;

  const RiskClassifier& classifier() const { return classifier_; }
  /// Blocks until no analysis job is queued or running.
  void wait_idle() { runner_->wait_idle(); }
  int peak_running_jobs() const { return runner_->peak_running(); }

 private:
  storage::Document owned(std::string_view collection, const std::string& id,
                          const std::string& user_id) const;
  std::vector<Value> list_owned(std::string_view collection, const std::string& user_id) const;
  void run_job(const std::string& job_id);
  void set_job_state(const std::string& job_id, std::string_view state, const Value& extra = Value::object());
  void recover_jobs();

  storage::DocumentStore& store_;
  RiskClassifier classifier_;
  RmsOptions options_;
  Clock clock_;
  ModelFactory factory_;
  std::mutex users_mu_;
  std::mutex jobs_mu_;
  std::unique_ptr<JobRunner> runner_;
};

/// Stored document body with `id` and `created_at` merged in.
Value view(const storage::Document& doc);

}  // namespace qms::rms
