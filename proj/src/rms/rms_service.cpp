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

#include "qms/rms/rms_service.hpp"

#include "qms/common/error.hpp"
#include "qms/eval/bundled_corpus.hpp"
#include "qms/eval/http_model_adapter.hpp"
#include "qms/eval/metric_suite.hpp"
#include "qms/eval/reference_lm.hpp"

#include <cmath>

namespace qms::rms {
namespace {

std::string required_text(const Value& request, const char* field) {
  if (!request.is_object() || !request.contains(field) || !request[field].is_string()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + field + "' must be a string",
                {{"field", field}});
  }
  auto text = request[field].get<std::string>();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + field + "' must not be empty",
                {{"field", field}});
  }
  return text;
}

template <typename T>
T bounded(const Value& j, const char* field, T fallback, T lo, T hi) {
  if (!j.contains(field)) return fallback;
  const T v = j.at(field).get<T>();
  if (!(v >= lo && v <= hi)) {
    throw Error(ErrorCode::kInvalidArgument, std::string("training.") + field + " is out of range",
                {{"field", field}, {"min", lo}, {"max", hi}});
  }
  return v;
}

eval::ReferenceLmOptions training_options(const Value& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "training must be an object");
  eval::ReferenceLmOptions o;
  o.embedding_dim = bounded(j, "embedding_dim", o.embedding_dim, 1, 256);
  o.context_length = bounded(j, "context_length", o.context_length, 1, 16);
  o.epochs = bounded(j, "epochs", o.epochs, 0, 1000);
  o.learning_rate = bounded(j, "learning_rate", o.learning_rate, 1e-6, 10.0);
  o.seed = j.value("seed", o.seed);
  o.init_scale = bounded(j, "init_scale", o.init_scale, 1e-6, 10.0);
  return o;
}

Value training_json(const eval::ReferenceLmOptions& o) {
  return {{"embedding_dim", o.embedding_dim}, {"context_length", o.context_length},
          {"epochs", o.epochs},               {"learning_rate", o.learning_rate},
          {"seed", o.seed},                   {"init_scale", o.init_scale}};
}

Value descriptor(const storage::Document& doc) {
  auto v = view(doc);
  v.erase("parameters");
  return v;
}

}  // namespace

Value view(const storage::Document& doc) {
  Value v = doc.body.is_object() ? doc.body : Value::object();
  v["id"] = doc.id;
  v["created_at"] = format_timestamp(doc.created_at);
  return v;
}

ModelFactory default_model_factory() {
  return [](const Value& model) -> std::unique_ptr<eval::ModelAdapter> {
    const auto kind = model.at("kind").get<std::string>();
    if (kind == "builtin") {
      return std::make_unique<eval::ReferenceLm>(eval::ReferenceLm::from_json(model.at("parameters")));
    }
    if (kind == "http") return std::make_unique<eval::HttpModelAdapter>(model.at("base_url").get<std::string>());
    throw Error(ErrorCode::kInvalidArgument, "unknown model kind " + kind);
  };
}

RmsService::RmsService(storage::DocumentStore& store, RiskClassifier classifier, RmsOptions options,
                       Clock clock, ModelFactory factory)
    : store_(store),
      classifier_(std::move(classifier)),
      options_(options),
      clock_(std::move(clock)),
      factory_(std::move(factory)) {
  runner_ = std::make_unique<JobRunner>(options_.max_running_jobs,
                                        [this](const std::string& id) { run_job(id); });
  recover_jobs();
}

RmsService::~RmsService() { runner_->shutdown(); }

storage::Document RmsService::owned(std::string_view collection, const std::string& id,
                                    const std::string& user_id) const {
  auto doc = store_.get(collection, id);
  std::string kind(collection);
  if (kind.back() == 's') kind.pop_back();
  if (!doc) throw Error(ErrorCode::kNotFound, kind + " " + id + " not found");
  if (doc->body.value("user_id", "") != user_id) {
    throw Error(ErrorCode::kForbidden, kind + " " + id + " belongs to another user");
  }
  return *doc;
}

std::vector<Value> RmsService::list_owned(std::string_view collection, const std::string& user_id) const {
  std::vector<Value> out;
  for (const auto& d : store_.query(collection, {{"user_id", user_id}})) out.push_back(view(d));
  return out;
}

// ------------------------------------------------------------------- users

Value RmsService::ensure_user(const std::string& user_id) {
  if (user_id.empty()) throw Error(ErrorCode::kInvalidArgument, "user_id must not be empty");
  std::lock_guard lock(users_mu_);
  const auto existing = store_.query("users", {{"user_id", user_id}});
  if (!existing.empty()) return existing.front().body;
  Value body = {{"user_id", user_id}, {"assessment_ids", Value::array()}};
  store_.insert("users", body);
  return body;
}

Value RmsService::get_user(const std::string& user_id) const {
  const auto docs = store_.query("users", {{"user_id", user_id}});
  if (docs.empty()) throw Error(ErrorCode::kNotFound, "user " + user_id + " not found");
  return docs.front().body;
}

std::vector<std::string> RmsService::user_ids() const {
  std::vector<std::string> out;
  for (const auto& d : store_.query("users")) out.push_back(d.body.at("user_id").get<std::string>());
  return out;
}

// ------------------------------------------------------------------ models

Value RmsService::register_model(const std::string& user_id, const Value& request) {
  const auto name = required_text(request, "name");
  const auto kind = request.value("kind", std::string("builtin"));
  Value body = {{"user_id", user_id}, {"name", name}, {"kind", kind}};
  if (kind == "builtin") {
    const auto options = training_options(request.value("training", Value::object()));
    const std::string corpus =
        request.contains("corpus") ? required_text(request, "corpus") : std::string(eval::bundled_corpus());
    auto [model, report] = eval::ReferenceLm::train(corpus, options);
    body["training"] = training_json(options);
    body["training_report"] = {{"initial_nll", report.initial_nll},
                               {"final_nll", report.final_nll},
                               {"epochs", report.epochs},
                               {"positions", report.positions}};
    body["corpus"] = request.contains("corpus") ? "custom" : "bundled";
    body["corpus_digest"] = model.corpus_digest();
    body["vocabulary_size"] = model.vocabulary().size();
    body["embedding_dim"] = model.embedding_dim();
    body["context_length"] = model.context_length();
    body["parameter_count"] = model.parameter_count();
    body["supports_gradients"] = true;
    body["parameters"] = model.to_json();
  } else if (kind == "http") {
    const auto url = required_text(request, "base_url");
    const eval::HttpModelAdapter probe(url, std::chrono::seconds(10));
    body["base_url"] = url;
    body["vocabulary_size"] = probe.vocabulary().size();
    body["has_embeddings"] = probe.has_embeddings();
    if (request.contains("parameter_count")) body["parameter_count"] = request["parameter_count"].get<std::uint64_t>();
  } else {
    throw Error(ErrorCode::kInvalidArgument, "model kind must be 'builtin' or 'http'", {{"field", "kind"}});
  }
  const auto id = store_.insert("models", std::move(body));
  return descriptor(*store_.get("models", id));
}

Value RmsService::get_model(const std::string& user_id, const std::string& model_id) const {
  return descriptor(owned("models", model_id, user_id));
}

std::vector<Value> RmsService::list_models(const std::string& user_id) const {
  auto models = list_owned("models", user_id);
  for (auto& m : models) m.erase("parameters");
  return models;
}

// --------------------------------------------------------- identification

Value RmsService::create_identification(const std::string& user_id, const Value& request) {
  const auto model_id = required_text(request, "model_id");
  owned("models", model_id, user_id);

  SystemDescription s;
  s.domain = required_text(request, "domain");
  s.purpose = required_text(request, "purpose");
  s.ai_user = required_text(request, "ai_user");
  s.ai_subject = required_text(request, "ai_subject");
  if (request.contains("capabilities")) {
    s.capabilities = request["capabilities"].get<std::vector<std::string>>();
  }
  s.is_gpai = request.value("is_gpai", false);
  if (request.contains("training_flops") && !request["training_flops"].is_null()) {
    s.training_flops = request["training_flops"].get<double>();
  }
  const auto c = classifier_.classify(s);

  Value body = {{"user_id", user_id},
                {"model_id", model_id},
                {"domain", s.domain},
                {"purpose", s.purpose},
                {"capabilities", s.capabilities},
                {"ai_user", s.ai_user},
                {"ai_subject", s.ai_subject},
                {"is_gpai", s.is_gpai},
                {"training_flops", s.training_flops ? Value(*s.training_flops) : Value(nullptr)},
                {"risk_class", to_string(c.risk_class)},
                {"systemic_risk", c.systemic_risk},
                {"rationale", c.rationale},
                {"vocabulary_version", classifier_.vocabulary().version},
                {"rules_version", classifier_.rules().version}};
  const auto id = store_.insert("identifications", std::move(body));
  return view(*store_.get("identifications", id));
}

Value RmsService::get_identification(const std::string& user_id, const std::string& id) const {
  return view(owned("identifications", id, user_id));
}

std::vector<Value> RmsService::list_identifications(const std::string& user_id) const {
  return list_owned("identifications", user_id);
}

// ---------------------------------------------------------------- datasets

Value RmsService::create_dataset(const std::string& user_id, const Value& request) {
  const auto name = required_text(request, "name");
  const auto domain = required_text(request, "domain");
  const auto task = required_text(request, "task");
  if (!request.contains("pairs") || !request["pairs"].is_array() || request["pairs"].empty()) {
    throw Error(ErrorCode::kInvalidArgument, "a verification dataset needs at least one pair",
                {{"reason", "empty-pairs"}});
  }
  auto pairs = Value::array();
  for (const auto& p : request["pairs"]) {
    const auto pair = p.get<eval::VerificationPair>();
    if (pair.input.empty()) throw Error(ErrorCode::kInvalidArgument, "pair input must not be empty");
    pairs.push_back(pair);
  }
  const auto id = store_.insert("datasets", {{"user_id", user_id},
                                             {"name", name},
                                             {"domain", domain},
                                             {"task", task},
                                             {"pairs", std::move(pairs)}});
  return view(*store_.get("datasets", id));
}

Value RmsService::get_dataset(const std::string& user_id, const std::string& id) const {
  return view(owned("datasets", id, user_id));
}

std::vector<Value> RmsService::list_datasets(const std::string& user_id) const {
  return list_owned("datasets", user_id);
}

// ---------------------------------------------------------------- analyses

Value RmsService::start_analysis(const std::string& user_id, const Value& request) {
  const auto model_id = required_text(request, "model_id");
  const auto dataset_id = required_text(request, "dataset_id");
  owned("models", model_id, user_id);
  owned("datasets", dataset_id, user_id);

  if (!request.contains("metrics") || !request["metrics"].is_array() || request["metrics"].empty()) {
    throw Error(ErrorCode::kInvalidArgument, "select at least one metric", {{"field", "metrics"}});
  }
  const auto registry = eval::MetricRegistry::with_builtin_metrics();
  std::vector<std::string> metrics;
  for (const auto& m : request["metrics"]) {
    const auto name = m.get<std::string>();
    if (!registry.find(name)) {
      throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + name + "'",
                  {{"field", "metrics"}, {"known", registry.names()}});
    }
    if (std::find(metrics.begin(), metrics.end(), name) == metrics.end()) metrics.push_back(name);
  }
  const auto params = request.value("params", Value::object()).get<eval::MetricParams>();
  params.validate();

  const auto analysis_id = store_.insert("analyses", {{"user_id", user_id},
                                                      {"model_id", model_id},
                                                      {"dataset_id", dataset_id},
                                                      {"selected_metrics", metrics},
                                                      {"params", params},
                                                      {"status", "Pending"},
                                                      {"results", nullptr}});
  const auto job_id = store_.insert("jobs", {{"user_id", user_id},
                                             {"analysis_id", analysis_id},
                                             {"state", "Pending"},
                                             {"progress", 0.0},
                                             {"error", nullptr}});
  auto analysis = store_.get("analyses", analysis_id)->body;
  analysis["job_id"] = job_id;
  store_.update("analyses", analysis_id, std::move(analysis));
  runner_->submit(job_id);
  return {{"analysis_id", analysis_id}, {"job_id", job_id}, {"state", "Pending"}};
}

Value RmsService::get_analysis(const std::string& user_id, const std::string& id) const {
  return view(owned("analyses", id, user_id));
}

std::vector<Value> RmsService::list_analyses(const std::string& user_id) const {
  return list_owned("analyses", user_id);
}

Value RmsService::get_job(const std::string& user_id, const std::string& job_id) const {
  auto job = view(owned("jobs", job_id, user_id));
  if (job["state"] == "Done") {
    job["results"] = store_.get("analyses", job["analysis_id"].get<std::string>())->body["results"];
  }
  return job;
}

void RmsService::set_job_state(const std::string& job_id, std::string_view state, const Value& extra) {
  std::lock_guard lock(jobs_mu_);
  auto job = store_.get("jobs", job_id);
  if (!job) return;
  auto body = job->body;
  body["state"] = state;
  for (const auto& [k, v] : extra.items()) body[k] = v;
  store_.update("jobs", job_id, std::move(body));
}

void RmsService::run_job(const std::string& job_id) {
  const auto job = store_.get("jobs", job_id);
  if (!job || job->body["state"] != "Pending") return;
  const auto analysis_id = job->body["analysis_id"].get<std::string>();
  auto analysis = store_.get("analyses", analysis_id)->body;
  set_job_state(job_id, "Running", {{"started_at", format_timestamp(clock_())}});
  analysis["status"] = "Running";
  store_.update("analyses", analysis_id, analysis);

  try {
    const auto model_doc = store_.get("models", analysis["model_id"].get<std::string>());
    const auto dataset_doc = store_.get("datasets", analysis["dataset_id"].get<std::string>());
    if (!model_doc || !dataset_doc) throw Error(ErrorCode::kNotFound, "model or dataset no longer exists");
    const auto model = factory_(model_doc->body);
    const auto pairs = dataset_doc->body.at("pairs").get<std::vector<eval::VerificationPair>>();
    const auto metrics = analysis["selected_metrics"].get<std::vector<std::string>>();
    const auto params = analysis["params"].get<eval::MetricParams>();
    const auto results = eval::run_metric_suite(
        *model, pairs, metrics, params, eval::MetricRegistry::with_builtin_metrics(),
        [&](std::size_t done, std::size_t total) {
          if (done < total) set_job_state(job_id, "Running", {{"progress", static_cast<double>(done) / total}});
        });
    analysis["status"] = "Done";
    analysis["results"] = results;
    analysis["completed_at"] = format_timestamp(clock_());
    store_.update("analyses", analysis_id, analysis);
    set_job_state(job_id, "Done", {{"progress", 1.0}, {"finished_at", format_timestamp(clock_())}});
  } catch (const std::exception& e) {
    analysis["status"] = "Failed";
    analysis["error"] = e.what();
    store_.update("analyses", analysis_id, analysis);
    set_job_state(job_id, "Failed", {{"error", e.what()}, {"finished_at", format_timestamp(clock_())}});
  }
}

void RmsService::recover_jobs() {
  for (const auto& job : store_.query("jobs")) {
    const auto state = job.body.value("state", "");
    if (state == "Pending") {
      runner_->submit(job.id);
    } else if (state == "Running") {
      // The process stopped mid-run; the results are lost.
      const auto analysis_id = job.body["analysis_id"].get<std::string>();
      if (auto analysis = store_.get("analyses", analysis_id)) {
        auto body = analysis->body;
        body["status"] = "Failed";
        body["error"] = "interrupted by service restart";
        store_.update("analyses", analysis_id, std::move(body));
      }
      set_job_state(job.id, "Failed", {{"error", "interrupted by service restart"}});
    }
  }
}

// ------------------------------------------------------------- assessments

Value RmsService::assemble_assessment(const std::string& user_id, const std::string& identification_id,
                                      const std::string& analysis_id) {
  const auto identification = owned("identifications", identification_id, user_id);
  const auto analysis = owned("analyses", analysis_id, user_id);
  if (analysis.body["status"] != "Done") {
    throw Error(ErrorCode::kFailedPrecondition, "analysis " + analysis_id + " is not Done",
                {{"status", analysis.body["status"]}});
  }
  if (identification.body["model_id"] != analysis.body["model_id"]) {
    throw Error(ErrorCode::kInvalidArgument, "identification and analysis concern different models");
  }
  const auto id = store_.insert("assessments", {{"user_id", user_id},
                                                {"identification_id", identification_id},
                                                {"analysis_id", analysis_id}});
  ensure_user(user_id);
  {
    std::lock_guard lock(users_mu_);
    const auto user = store_.query("users", {{"user_id", user_id}}).front();
    auto body = user.body;
    body["assessment_ids"].push_back(id);
    store_.update("users", user.id, std::move(body));
  }
  return get_assessment(user_id, id);
}

Value RmsService::get_assessment(const std::string& user_id, const std::string& id) const {
  auto v = view(owned("assessments", id, user_id));
  auto ids = Value::array();
  for (const auto& m : store_.query("mitigations", {{"assessment_id", id}})) ids.push_back(m.id);
  v["mitigation_ids"] = std::move(ids);
  return v;
}

std::vector<Value> RmsService::list_assessments(const std::string& user_id) const {
  std::vector<Value> out;
  for (const auto& a : store_.query("assessments", {{"user_id", user_id}})) {
    out.push_back(get_assessment(user_id, a.id));
  }
  return out;
}

Value RmsService::assessment_bundle(const std::string& user_id, const std::string& id) const {
  auto assessment = get_assessment(user_id, id);
  auto identification = get_identification(user_id, assessment["identification_id"].get<std::string>());
  auto analysis = get_analysis(user_id, assessment["analysis_id"].get<std::string>());
  auto model = get_model(user_id, analysis["model_id"].get<std::string>());
  auto dataset = get_dataset(user_id, analysis["dataset_id"].get<std::string>());
  return {{"assessment", std::move(assessment)},
          {"identification", std::move(identification)},
          {"analysis", std::move(analysis)},
          {"model", std::move(model)},
          {"dataset", std::move(dataset)},
          {"mitigations", list_mitigations(user_id, id)}};
}

Value RmsService::add_mitigation(const std::string& user_id, const std::string& assessment_id,
                                 const std::string& description) {
  owned("assessments", assessment_id, user_id);
  if (description.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "mitigation description must not be empty",
                {{"field", "description"}});
  }
  const auto id = store_.insert("mitigations", {{"user_id", user_id},
                                                {"assessment_id", assessment_id},
                                                {"description", description}});
  return view(*store_.get("mitigations", id));
}

std::vector<Value> RmsService::list_mitigations(const std::string& user_id,
                                                const std::string& assessment_id) const {
  owned("assessments", assessment_id, user_id);
  std::vector<Value> out;
  for (const auto& m : store_.query("mitigations", {{"assessment_id", assessment_id}})) out.push_back(view(m));
  return out;
}

}  // namespace qms::rms
