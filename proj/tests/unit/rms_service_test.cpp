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

#include "qms/common/error.hpp"
#include "qms/common/http.hpp"
#include "qms/eval/bundled_corpus.hpp"
#include "qms/rms/rms_http.hpp"
#include "qms/rms/rms_service.hpp"
#include "support/table_model.hpp"
#include "support/temp_dir.hpp"
#include "support/test_server.hpp"

#include <gtest/gtest.h>

#include <set>
#include <thread>

namespace qms::rms {
namespace {

using testing::TempDir;

const Value kFastModel = {{"name", "reference"}, {"kind", "builtin"}, {"training", {{"epochs", 3}}}};

Value demo_dataset() {
  return {{"name", "actor-activity"},
          {"domain", "Industry Process Description"},
          {"task", "Summarization"},
          {"pairs",
           {{{"input", std::string(eval::demo_prompt())},
             {"expected_output", std::string(eval::demo_expected_output())}}}}};
}

Value chatbot_identification(const std::string& model_id) {
  return {{"model_id", model_id},
          {"domain", "retail customer service"},
          {"purpose", "customer support"},
          {"capabilities", {"conversational chatbot"}},
          {"ai_user", "business"},
          {"ai_subject", "consumer"},
          {"is_gpai", false}};
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInternal;
}

Value wait_for_job(const RmsService& service, const std::string& user, const std::string& job) {
  for (int i = 0; i < 2000; ++i) {
    auto j = service.get_job(user, job);
    if (j["state"] == "Done" || j["state"] == "Failed") return j;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ADD_FAILURE() << "job did not finish";
  return nullptr;
}

class RmsServiceTest : public ::testing::Test {
 protected:
  void open(RmsOptions options = {}, ModelFactory factory = default_model_factory()) {
    service_.reset();
    store_ = std::make_unique<storage::DocumentStore>(dir_.path());
    service_ = std::make_unique<RmsService>(*store_, RiskClassifier::bundled(), options, system_clock(),
                                            std::move(factory));
  }
  void SetUp() override { open(); }

  TempDir dir_;
  std::unique_ptr<storage::DocumentStore> store_;
  std::unique_ptr<RmsService> service_;
  const std::string alice_ = "aaaaaaaaaaaaaaaaaaaaaaaa";
  const std::string bob_ = "bbbbbbbbbbbbbbbbbbbbbbbb";
};

TEST_F(RmsServiceTest, SixStepProcessEndToEnd) {
  auto& s = *service_;
  s.ensure_user(alice_);
  // 1. component selection
  const auto model = s.register_model(alice_, kFastModel);
  EXPECT_FALSE(model.contains("parameters"));
  EXPECT_GT(model["parameter_count"].get<int>(), 0);
  // 2. risk identification
  const auto ident = s.create_identification(alice_, chatbot_identification(model["id"]));
  EXPECT_EQ(ident["risk_class"], "Limited");
  // 3. verification data
  const auto dataset = s.create_dataset(alice_, demo_dataset());
  EXPECT_EQ(dataset["pairs"][0]["input"], std::string(eval::demo_prompt()));
  // 4. risk analysis
  const auto started = s.start_analysis(alice_, {{"model_id", model["id"]},
                                                 {"dataset_id", dataset["id"]},
                                                 {"metrics", {"accuracy", "rouge", "perplexity", "saliency", "adversarial"}},
                                                 {"params", {{"max_iterations", 5}}}});
  const auto job = wait_for_job(s, alice_, started["job_id"]);
  ASSERT_EQ(job["state"], "Done") << job.dump();
  EXPECT_EQ(job["progress"], 1.0);
  EXPECT_EQ(job["results"].size(), 5u);
  for (const auto& [name, entry] : job["results"].items()) EXPECT_EQ(entry["status"], "ok") << name;
  // Terminal state is stable.
  EXPECT_EQ(s.get_job(alice_, started["job_id"]), job);
  // 5. risk assessment
  const auto before = s.list_assessments(alice_).size();
  const auto assessment = s.assemble_assessment(alice_, ident["id"], started["analysis_id"]);
  const auto listed = s.list_assessments(alice_);
  ASSERT_EQ(listed.size(), before + 1);
  EXPECT_EQ(std::count_if(listed.begin(), listed.end(), [&](const Value& a) { return a["id"] == assessment["id"]; }), 1);
  EXPECT_EQ(s.get_user(alice_)["assessment_ids"], Value::array({assessment["id"]}));
  // 6. risk mitigation
  for (const auto* text : {"add a disclosure banner", "human review of escalations", "log conversations"}) {
    s.add_mitigation(alice_, assessment["id"], text);
  }
  const auto mitigations = s.list_mitigations(alice_, assessment["id"]);
  ASSERT_EQ(mitigations.size(), 3u);
  EXPECT_EQ(mitigations[0]["description"], "add a disclosure banner");
  EXPECT_EQ(mitigations[2]["description"], "log conversations");
  EXPECT_EQ(s.get_assessment(alice_, assessment["id"])["mitigation_ids"].size(), 3u);
  EXPECT_EQ(code_of([&] { s.add_mitigation(alice_, assessment["id"], "  "); }), ErrorCode::kInvalidArgument);

  const auto bundle = s.assessment_bundle(alice_, assessment["id"]);
  EXPECT_EQ(bundle["identification"]["id"], ident["id"]);
  EXPECT_EQ(bundle["analysis"]["results"], job["results"]);
  EXPECT_EQ(bundle["mitigations"].size(), 3u);
  EXPECT_FALSE(bundle["model"].contains("parameters"));
}

TEST_F(RmsServiceTest, OtherUsersObjectsAreForbidden) {
  auto& s = *service_;
  const auto model = s.register_model(alice_, kFastModel);
  const auto dataset = s.create_dataset(alice_, demo_dataset());
  EXPECT_EQ(code_of([&] { s.get_model(bob_, model["id"]); }), ErrorCode::kForbidden);
  EXPECT_EQ(code_of([&] { s.create_identification(bob_, chatbot_identification(model["id"])); }),
            ErrorCode::kForbidden);
  EXPECT_EQ(code_of([&] {
              s.start_analysis(bob_, {{"model_id", model["id"]}, {"dataset_id", dataset["id"]}, {"metrics", {"accuracy"}}});
            }),
            ErrorCode::kForbidden);
  EXPECT_TRUE(s.list_models(bob_).empty());
  EXPECT_EQ(code_of([&] { s.get_model(alice_, "000000000000000000000000"); }), ErrorCode::kNotFound);
}

TEST_F(RmsServiceTest, ValidatesRequests) {
  auto& s = *service_;
  const auto model = s.register_model(alice_, kFastModel);
  const auto dataset = s.create_dataset(alice_, demo_dataset());
  auto empty = demo_dataset();
  empty["pairs"] = Value::array();
  try {
    s.create_dataset(alice_, empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.details()["reason"], "empty-pairs");
  }
  auto analysis = [&](Value params, Value metrics) {
    return code_of([&] {
      s.start_analysis(alice_, {{"model_id", model["id"]}, {"dataset_id", dataset["id"]}, {"metrics", metrics}, {"params", params}});
    });
  };
  EXPECT_EQ(analysis({{"epsilon", 0}}, {"accuracy"}), ErrorCode::kInvalidArgument);
  EXPECT_EQ(analysis({{"epsilon", -1}}, {"accuracy"}), ErrorCode::kInvalidArgument);
  EXPECT_EQ(analysis({{"rouge_n", 0}}, {"rouge"}), ErrorCode::kInvalidArgument);
  EXPECT_EQ(analysis(Value::object(), Value::array()), ErrorCode::kInvalidArgument);
  EXPECT_EQ(analysis(Value::object(), {"bleu"}), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { s.register_model(alice_, {{"name", "m"}, {"kind", "onnx"}}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { s.register_model(alice_, {{"name", "m"}, {"training", {{"embedding_dim", 0}}}}); }),
            ErrorCode::kInvalidArgument);
  auto bad_ident = chatbot_identification(model["id"]);
  bad_ident["domain"] = "space tourism";
  EXPECT_EQ(code_of([&] { s.create_identification(alice_, bad_ident); }), ErrorCode::kInvalidArgument);
  EXPECT_TRUE(s.list_identifications(alice_).empty());
}

TEST_F(RmsServiceTest, AssessmentRequiresDoneAnalysisOfSameModel) {
  auto& s = *service_;
  const auto m1 = s.register_model(alice_, kFastModel);
  const auto m2 = s.register_model(alice_, kFastModel);
  const auto dataset = s.create_dataset(alice_, demo_dataset());
  const auto ident = s.create_identification(alice_, chatbot_identification(m1["id"]));
  const auto other = s.start_analysis(alice_, {{"model_id", m2["id"]}, {"dataset_id", dataset["id"]}, {"metrics", {"accuracy"}}});
  wait_for_job(s, alice_, other["job_id"]);
  EXPECT_EQ(code_of([&] { s.assemble_assessment(alice_, ident["id"], other["analysis_id"]); }),
            ErrorCode::kInvalidArgument);
  EXPECT_TRUE(s.list_assessments(alice_).empty());
}

// A model whose every forward pass takes a while, so jobs overlap.
ModelFactory slow_factory(std::chrono::milliseconds delay) {
  return [delay](const Value&) -> std::unique_ptr<eval::ModelAdapter> {
    return std::make_unique<testing::TableModel>(
        std::vector<std::string>{"<bos>", "<eos>", "<unk>", "a"}, [delay](std::span<const eval::TokenId>) {
          std::this_thread::sleep_for(delay);
          eval::Vector z = eval::Vector::Zero(4);
          z(1) = 1.0;
          return z;
        });
  };
}

TEST_F(RmsServiceTest, AtMostKJobsRunConcurrently) {
  open({.max_running_jobs = 2}, slow_factory(std::chrono::milliseconds(150)));
  auto& s = *service_;
  const auto model = s.register_model(alice_, kFastModel);
  const auto dataset = s.create_dataset(alice_, demo_dataset());
  std::vector<std::string> jobs;
  for (int i = 0; i < 3; ++i) {
    jobs.push_back(s.start_analysis(alice_, {{"model_id", model["id"]}, {"dataset_id", dataset["id"]}, {"metrics", {"accuracy"}}})["job_id"]);
  }
  int max_running = 0;
  bool all_done = false;
  while (!all_done) {
    int running = 0;
    all_done = true;
    for (const auto& j : jobs) {
      const auto state = s.get_job(alice_, j)["state"];
      running += state == "Running";
      all_done = all_done && (state == "Done" || state == "Failed");
    }
    max_running = std::max(max_running, running);
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  EXPECT_LE(max_running, 2);
  EXPECT_EQ(s.peak_running_jobs(), 2);
  for (const auto& j : jobs) EXPECT_EQ(s.get_job(alice_, j)["state"], "Done");
}

TEST_F(RmsServiceTest, GradientlessModelMarksGradientMetricsUnsupported) {
  open({}, slow_factory(std::chrono::milliseconds(0)));
  auto& s = *service_;
  const auto model = s.register_model(alice_, kFastModel);
  const auto dataset = s.create_dataset(alice_, demo_dataset());
  const auto started = s.start_analysis(
      alice_, {{"model_id", model["id"]}, {"dataset_id", dataset["id"]}, {"metrics", {"accuracy", "saliency", "adversarial"}}});
  const auto job = wait_for_job(s, alice_, started["job_id"]);
  EXPECT_EQ(job["state"], "Done");
  EXPECT_EQ(job["results"]["accuracy"]["status"], "ok");
  EXPECT_EQ(job["results"]["saliency"]["error"]["code"], "unsupported");
  EXPECT_EQ(job["results"]["adversarial"]["error"]["code"], "unsupported");
}

TEST_F(RmsServiceTest, FactoryFailureFailsTheJob) {
  open({}, [](const Value&) -> std::unique_ptr<eval::ModelAdapter> {
    throw Error(ErrorCode::kUnavailable, "model server down");
  });
  auto& s = *service_;
  const auto model = s.register_model(alice_, kFastModel);
  const auto dataset = s.create_dataset(alice_, demo_dataset());
  const auto started = s.start_analysis(alice_, {{"model_id", model["id"]}, {"dataset_id", dataset["id"]}, {"metrics", {"accuracy"}}});
  const auto job = wait_for_job(s, alice_, started["job_id"]);
  EXPECT_EQ(job["state"], "Failed");
  EXPECT_NE(job["error"].get<std::string>().find("model server down"), std::string::npos);
  EXPECT_EQ(s.get_analysis(alice_, started["analysis_id"])["status"], "Failed");
}

TEST_F(RmsServiceTest, RestartResumesPendingAndFailsInterruptedJobs) {
  auto& s = *service_;
  const auto model = s.register_model(alice_, kFastModel);
  const auto dataset = s.create_dataset(alice_, demo_dataset());
  const auto done = s.start_analysis(alice_, {{"model_id", model["id"]}, {"dataset_id", dataset["id"]}, {"metrics", {"accuracy"}}});
  s.wait_idle();
  service_.reset();
  // Simulate a crash: one job left Pending, one left Running.
  auto pending_a = store_->insert("analyses", {{"user_id", alice_}, {"model_id", model["id"]}, {"dataset_id", dataset["id"]},
                                               {"selected_metrics", {"accuracy"}}, {"params", Value::object()}, {"status", "Pending"}});
  auto pending_j = store_->insert("jobs", {{"user_id", alice_}, {"analysis_id", pending_a}, {"state", "Pending"}, {"progress", 0.0}});
  auto running_a = store_->insert("analyses", {{"user_id", alice_}, {"model_id", model["id"]}, {"dataset_id", dataset["id"]},
                                               {"selected_metrics", {"accuracy"}}, {"params", Value::object()}, {"status", "Running"}});
  auto running_j = store_->insert("jobs", {{"user_id", alice_}, {"analysis_id", running_a}, {"state", "Running"}, {"progress", 0.0}});
  open();
  service_->wait_idle();
  EXPECT_EQ(service_->get_job(alice_, pending_j)["state"], "Done");
  EXPECT_EQ(service_->get_job(alice_, running_j)["state"], "Failed");
  EXPECT_EQ(service_->get_analysis(alice_, running_a)["status"], "Failed");
  EXPECT_EQ(service_->get_job(alice_, done["job_id"])["state"], "Done");
}

TEST_F(RmsServiceTest, EnsureUserIsIdempotent) {
  service_->ensure_user(alice_);
  service_->ensure_user(alice_);
  service_->ensure_user(bob_);
  EXPECT_EQ(service_->user_ids(), (std::vector<std::string>{alice_, bob_}));
  EXPECT_EQ(code_of([&] { service_->get_user("cccccccccccccccccccccccc"); }), ErrorCode::kNotFound);
}

// --------------------------------------------------------------------- HTTP

class RmsHttpTest : public RmsServiceTest {
 protected:
  void SetUp() override {
    RmsServiceTest::SetUp();
    register_routes(server_.server(), *service_);
    server_.start();
  }
  http::Reply post(const std::string& path, const Value& body, const std::string& user) const {
    return http::JsonClient(server_.url()).post(path, body, {{http::kUserIdHeader, user}});
  }
  http::Reply get(const std::string& path, const std::string& user) const {
    return http::JsonClient(server_.url()).get(path, {{http::kUserIdHeader, user}});
  }
  qms::testing::TestServer server_;
};

TEST_F(RmsHttpTest, RoutesCoverTheProcess) {
  EXPECT_EQ(post("/rms/users", {{"user_id", alice_}}, alice_).status, 200);
  EXPECT_EQ(post("/rms/users", {{"user_id", bob_}}, alice_).status, 403);
  EXPECT_EQ(get("/rms/users/me", alice_).json()["user_id"], alice_);

  const auto model = post("/rms/models", kFastModel, alice_);
  ASSERT_EQ(model.status, 201) << model.body;
  const auto model_id = model.json()["id"].get<std::string>();
  EXPECT_EQ(get("/rms/models", alice_).json()["items"].size(), 1u);
  EXPECT_EQ(get("/rms/models/" + model_id, bob_).status, 403);
  EXPECT_EQ(get("/rms/models/" + model_id, "").status, 401);

  const auto ident = post("/rms/identifications", chatbot_identification(model_id), alice_);
  ASSERT_EQ(ident.status, 201) << ident.body;
  auto bad = chatbot_identification(model_id);
  bad["capabilities"] = {"chatbot"};
  const auto rejected = post("/rms/identifications", bad, alice_);
  EXPECT_EQ(rejected.status, 400);
  EXPECT_EQ(rejected.json()["error"]["details"]["suggestions"][0], "conversational chatbot");

  const auto dataset = post("/rms/datasets", demo_dataset(), alice_);
  ASSERT_EQ(dataset.status, 201);
  const auto started = post("/rms/analyses",
                            {{"model_id", model_id}, {"dataset_id", dataset.json()["id"]}, {"metrics", {"accuracy", "perplexity"}}},
                            alice_);
  ASSERT_EQ(started.status, 202) << started.body;
  const auto job_id = started.json()["job_id"].get<std::string>();
  service_->wait_idle();
  const auto job = get("/rms/jobs/" + job_id, alice_);
  EXPECT_EQ(job.json()["state"], "Done");
  EXPECT_EQ(get("/rms/jobs/000000000000000000000000", alice_).status, 404);

  const auto assessment = post("/rms/assessments",
                               {{"identification_id", ident.json()["id"]}, {"analysis_id", started.json()["analysis_id"]}}, alice_);
  ASSERT_EQ(assessment.status, 201) << assessment.body;
  const auto aid = assessment.json()["id"].get<std::string>();
  EXPECT_EQ(get("/rms/assessments?user=" + alice_, alice_).json()["items"].size(), 1u);
  EXPECT_EQ(get("/rms/assessments?user=" + alice_, bob_).status, 403);
  EXPECT_EQ(get("/rms/assessments", bob_).json()["items"].size(), 0u);
  EXPECT_EQ(post("/rms/assessments/" + aid + "/mitigations", {{"description", "disclose the bot"}}, alice_).status, 201);
  EXPECT_EQ(post("/rms/assessments/" + aid + "/mitigations", {{"description", ""}}, alice_).status, 400);
  EXPECT_EQ(get("/rms/assessments/" + aid + "/mitigations", alice_).json()["items"].size(), 1u);
  EXPECT_EQ(get("/rms/assessments/" + aid + "/bundle", alice_).json()["mitigations"].size(), 1u);
  EXPECT_EQ(get("/rms/assessments/" + aid + "/bundle", bob_).status, 403);

  const auto vocab = get("/rms/vocabulary", alice_).json();
  EXPECT_TRUE(vocab["fields"].contains("domain"));
  EXPECT_EQ(vocab["rules"][0]["class"], "Unacceptable");
}

}  // namespace
}  // namespace qms::rms
