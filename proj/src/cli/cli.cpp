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

#include "qms/cli/cli.hpp"

#include "qms/common/config.hpp"
#include "qms/common/error.hpp"
#include "qms/common/http.hpp"
#include "qms/eval/bundled_corpus.hpp"
#include "qms/eval/memory_estimate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

namespace qms::cli {
namespace {

using Value = nlohmann::json;

const std::vector<std::string> kAllMetrics{"accuracy", "rouge", "perplexity", "saliency", "adversarial"};
constexpr auto kPollInterval = std::chrono::milliseconds(250);

struct Globals {
  std::string gateway_url;
  std::string token;
  std::string config_path;
  std::string email;
  std::string password;
  std::string username;
};

/// Gateway client that reports failures by service prefix.
class Api {
 public:
  Api(const Globals& g) : g_(g), client_(g.gateway_url) {}

  Value get(const std::string& path) { return call("GET", path, nullptr).json_or_throw(); }
  Value post(const std::string& path, const Value& body) { return call("POST", path, body).json_or_throw(); }
  http::Reply raw_get(const std::string& path) {
    auto reply = call("GET", path, nullptr);
    if (!reply.ok()) reply.json_or_throw();
    return reply;
  }

  /// Signs in with the configured credentials unless a token was given.
  void authenticate() {
    if (!token_.empty()) return;
    token_ = g_.token;
    if (!token_.empty()) return;
    token_ = post("/api/auth/signin", {{"email", g_.email}, {"password", g_.password}})["token"];
  }

  /// Resolves a name to an id via a list endpoint; an existing id passes
  /// through. Several objects with the name are an error.
  std::optional<std::string> resolve(const std::string& list_path, const std::string& name_or_id) {
    std::vector<std::string> hits;
    const auto list = get(list_path);
    for (const auto& item : list["items"]) {
      if (item["id"] == name_or_id) return name_or_id;
      if (item.value("name", "") == name_or_id) hits.push_back(item["id"]);
    }
    if (hits.size() > 1) {
      throw Error(ErrorCode::kConflict, "name '" + name_or_id + "' matches " + std::to_string(hits.size()) +
                                            " objects at " + list_path + "; pass an id instead");
    }
    if (hits.empty()) return std::nullopt;
    return hits.front();
  }

 private:
  http::Reply call(const std::string& method, const std::string& path, const Value& body) {
    const auto prefix = path.substr(5, path.find('/', 5) - 5);  // after "/api/"
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
    try {
      auto reply = method == "GET" ? client_.get(path, headers) : client_.post(path, body, headers);
      if (reply.status == 502 || reply.status == 504) {
        throw Error(reply.status == 502 ? ErrorCode::kUnavailable : ErrorCode::kTimeout,
                    "service '" + prefix + "' is unreachable behind the gateway (HTTP " +
                        std::to_string(reply.status) + ")");
      }
      return reply;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnavailable && e.code() != ErrorCode::kTimeout) throw;
      if (std::string(e.what()).rfind("service '", 0) == 0) throw;
      throw Error(e.code(), "cannot reach the gateway at " + g_.gateway_url + " (service '" + prefix + "'): " +
                                e.what());
    }
  }

  const Globals& g_;
  http::JsonClient client_;
  std::string token_;
};

Value demo_dataset() {
  return {{"name", "actor-activity"},
          {"domain", "Industry Process Description"},
          {"task", "Summarization"},
          {"pairs",
           {{{"input", std::string(eval::demo_prompt())},
             {"expected_output", std::string(eval::demo_expected_output())}}}}};
}

std::string write_or_print(const std::string& content, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return "standard output";
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kUnavailable, "cannot write " + path);
  file << content;
  if (!file.flush()) throw Error(ErrorCode::kUnavailable, "cannot write " + path);
  return path;
}

std::string document_path(const std::string& assessment, const std::string& format) {
  return "/api/docgen/assessments/" + assessment + "/document?format=" + format;
}

// ------------------------------------------------------------------ seed

struct SeedArgs {
  std::string model = "reference-lm";
  std::string dataset = "actor-activity";
  int epochs = -1;
};

void cmd_seed(const Globals& g, const SeedArgs& a, std::ostream& out) {
  Api api(g);
  const auto signup = [&]() -> std::optional<Value> {
    try {
      return api.post("/api/auth/signup", {{"username", g.username}, {"email", g.email}, {"password", g.password}});
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConflict) return std::nullopt;  // already seeded
      throw;
    }
  }();
  if (signup) {
    for (const auto& p : (*signup)["propagation"]) {
      if (p["status"] != "ok") {
        throw Error(ErrorCode::kUnavailable,
                    "user created but service '" + p["service"].get<std::string>() + "' did not receive it: " +
                        p.value("error", "") + "; run seed again once it is reachable");
      }
    }
  }
  api.authenticate();

  auto model = api.resolve("/api/rms/models", a.model);
  if (!model) {
    Value request = {{"name", a.model}, {"kind", "builtin"}};
    if (a.epochs >= 0) request["training"] = {{"epochs", a.epochs}};
    model = api.post("/api/rms/models", request)["id"];
  }
  auto dataset = api.resolve("/api/rms/datasets", a.dataset);
  if (!dataset) {
    auto request = demo_dataset();
    request["name"] = a.dataset;
    dataset = api.post("/api/rms/datasets", request)["id"];
  }
  out << "user " << g.email << (signup ? " created" : " exists") << '\n'
      << "model " << a.model << ' ' << *model << '\n'
      << "dataset " << a.dataset << ' ' << *dataset << '\n';
}

// ---------------------------------------------------------------- assess

struct AssessArgs {
  std::string model = "reference-lm";
  std::string dataset = "actor-activity";
  std::vector<std::string> metrics = kAllMetrics;
  double epsilon = 0.05;
  int max_iters = 10;
  std::string out;
  std::string domain = "industrial process management";
  std::string purpose = "information extraction";
  std::vector<std::string> capabilities{"text generation"};
  std::string ai_user = "business";
  std::string ai_subject = "no natural person";
  bool gpai = false;
  std::optional<double> training_flops;
  std::vector<std::string> mitigations;
  int timeout_s = 600;
};

int cmd_assess(const Globals& g, const AssessArgs& a, std::ostream& out, std::ostream& err) {
  Api api(g);
  api.authenticate();
  const auto model = api.resolve("/api/rms/models", a.model);
  if (!model) throw Error(ErrorCode::kNotFound, "no model named '" + a.model + "'; run `qms seed` first");
  const auto dataset = api.resolve("/api/rms/datasets", a.dataset);
  if (!dataset) throw Error(ErrorCode::kNotFound, "no dataset named '" + a.dataset + "'; run `qms seed` first");

  Value identification = {{"model_id", *model},
                          {"domain", a.domain},
                          {"purpose", a.purpose},
                          {"capabilities", a.capabilities},
                          {"ai_user", a.ai_user},
                          {"ai_subject", a.ai_subject},
                          {"is_gpai", a.gpai}};
  if (a.training_flops) identification["training_flops"] = *a.training_flops;
  const auto ident = api.post("/api/rms/identifications", identification);
  err << "risk class " << ident["risk_class"].get<std::string>()
      << (ident.value("systemic_risk", false) ? " (systemic risk)" : "") << '\n';

  const auto started = api.post("/api/rms/analyses", {{"model_id", *model},
                                                      {"dataset_id", *dataset},
                                                      {"metrics", a.metrics},
                                                      {"params", {{"epsilon", a.epsilon},
                                                                  {"max_iterations", a.max_iters}}}});
  const auto job_id = started["job_id"].get<std::string>();
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(a.timeout_s);
  Value job;
  for (;;) {
    job = api.get("/api/rms/jobs/" + job_id);
    const auto state = job["state"].get<std::string>();
    if (state == "Done") break;
    if (state == "Failed") {
      err << "analysis failed: " << job.value("error", Value("unknown error")).dump() << '\n';
      return kExitFailed;
    }
    if (std::chrono::steady_clock::now() > deadline) {
      err << "analysis did not finish within " << a.timeout_s << " s\n";
      return kExitFailed;
    }
    std::this_thread::sleep_for(kPollInterval);
  }

  const auto assessment = api.post("/api/rms/assessments", {{"identification_id", ident["id"]},
                                                            {"analysis_id", started["analysis_id"]}});
  const auto id = assessment["id"].get<std::string>();
  for (const auto& m : a.mitigations) api.post("/api/rms/assessments/" + id + "/mitigations", {{"description", m}});
  const auto doc = api.raw_get(document_path(id, "markdown"));
  const auto path = a.out.empty() ? "assessment-" + id + ".md" : a.out;
  std::ofstream file(path, std::ios::binary);
  if (!(file << doc.body) || !file.flush()) throw Error(ErrorCode::kUnavailable, "cannot write " + path);
  out << id << '\n';
  err << "documentation written to " << path << '\n';
  return kExitOk;
}

// -------------------------------------------------------------- estimate

std::uint64_t parse_count(const std::string& text) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || !std::isfinite(value) || value < 1 || value != std::floor(value) ||
      value >= 18446744073709551616.0) {
    throw CLI::ValidationError("--params", "expected a positive whole number of parameters, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(value);
}

void cmd_estimate(const std::string& params, const std::string& precision, bool gradients, std::ostream& out) {
  const auto p = eval::parse_precision(precision);
  const auto e = eval::estimate_memory(parse_count(params), *p, gradients);
  char gb[32];
  std::snprintf(gb, sizeof gb, "%.6g", e.gigabytes());
  out << e.total_bytes << " bytes (" << gb << " GB)\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"QMS command line: seed fixtures, run headless assessments, export documentation"};
  app.name("qms");
  app.require_subcommand(1);
  Globals g;
  app.add_option("--gateway-url", g.gateway_url, "gateway base URL (default http://127.0.0.1:8080)");
  app.add_option("--token", g.token, "bearer token; otherwise sign in with --email/--password");
  app.add_option("--config", g.config_path, "environment file with GATEWAY_URL, QMS_TOKEN, QMS_EMAIL, QMS_PASSWORD")
      ->check(CLI::ExistingFile);
  app.add_option("--email", g.email, "account email (default demo@qms.local)");
  app.add_option("--password", g.password, "account password");
  app.add_option("--username", g.username, "display name used by seed");

  SeedArgs seed;
  auto* seed_cmd = app.add_subcommand("seed", "create the demo user, reference model and demo dataset");
  seed_cmd->add_option("--model", seed.model, "model name")->capture_default_str();
  seed_cmd->add_option("--dataset", seed.dataset, "dataset name")->capture_default_str();
  seed_cmd->add_option("--epochs", seed.epochs, "training epochs for the reference model")
      ->check(CLI::NonNegativeNumber);

  AssessArgs assess;
  auto* assess_cmd = app.add_subcommand("assess", "classify, analyze, assemble and export one assessment");
  assess_cmd->add_option("--model", assess.model, "model name or id")->capture_default_str();
  assess_cmd->add_option("--dataset", assess.dataset, "dataset name or id")->capture_default_str();
  assess_cmd->add_option("--metrics", assess.metrics, "metrics to run")
      ->delimiter(',')
      ->check(CLI::IsMember(kAllMetrics));
  assess_cmd->add_option("--epsilon", assess.epsilon, "adversarial step size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  assess_cmd->add_option("--max-iters", assess.max_iters, "adversarial iterations")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  assess_cmd->add_option("--out", assess.out, "Markdown output path (default assessment-<id>.md)");
  assess_cmd->add_option("--domain", assess.domain)->capture_default_str();
  assess_cmd->add_option("--purpose", assess.purpose)->capture_default_str();
  assess_cmd->add_option("--capabilities", assess.capabilities)->delimiter(',');
  assess_cmd->add_option("--ai-user", assess.ai_user)->capture_default_str();
  assess_cmd->add_option("--ai-subject", assess.ai_subject)->capture_default_str();
  assess_cmd->add_flag("--gpai", assess.gpai, "the model is a general-purpose AI model");
  assess_cmd->add_option("--training-flops", assess.training_flops)->check(CLI::NonNegativeNumber);
  assess_cmd->add_option("--mitigation", assess.mitigations, "mitigation measure to record (repeatable)");
  assess_cmd->add_option("--timeout", assess.timeout_s, "seconds to wait for the analysis")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string params, precision = "fp32";
  bool gradients = false;
  auto* estimate_cmd = app.add_subcommand("estimate", "accelerator memory for a model size");
  estimate_cmd->add_option("--params", params, "parameter count, e.g. 7e9")->required();
  estimate_cmd->add_option("--precision", precision, "fp32 or fp16")
      ->check(CLI::IsMember({"fp32", "float32", "fp16", "float16"}))
      ->capture_default_str();
  estimate_cmd->add_flag("--gradients", gradients, "add memory for input gradients");

  std::string export_id, export_format = "markdown", export_out;
  auto* export_cmd = app.add_subcommand("export", "download an assessment's documentation");
  export_cmd->add_option("assessment", export_id, "assessment id")->required();
  export_cmd->add_option("--format", export_format)
      ->check(CLI::IsMember({"markdown", "json"}))
      ->capture_default_str();
  export_cmd->add_option("--out", export_out, "output path (default standard output)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
    if (estimate_cmd->parsed()) parse_count(params);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Config file;
    if (!g.config_path.empty()) file = Config::from_file(g.config_path);
    auto pick = [&](std::string& v, const char* key, const char* fallback) {
      if (v.empty()) v = file.get_or(key, fallback);
    };
    pick(g.gateway_url, "GATEWAY_URL", "http://127.0.0.1:8080");
    pick(g.token, "QMS_TOKEN", "");
    pick(g.email, "QMS_EMAIL", "demo@qms.local");
    pick(g.password, "QMS_PASSWORD", "demo-password");
    pick(g.username, "QMS_USERNAME", "demo");
    if (!http::is_valid_url(g.gateway_url)) {
      err << "qms: invalid --gateway-url " << g.gateway_url << '\n';
      return kExitUsage;
    }

    if (estimate_cmd->parsed()) {
      cmd_estimate(params, precision, gradients, out);
    } else if (seed_cmd->parsed()) {
      cmd_seed(g, seed, out);
    } else if (assess_cmd->parsed()) {
      return cmd_assess(g, assess, out, err);
    } else if (export_cmd->parsed()) {
      Api api(g);
      api.authenticate();
      const auto doc = api.raw_get(document_path(export_id, export_format));
      const auto where = write_or_print(doc.body, export_out, out);
      if (!export_out.empty()) err << "documentation written to " << where << '\n';
    }
  } catch (const Error& e) {
    err << "qms: " << e.what() << '\n';
    if (e.details().is_object() && e.details().contains("suggestions")) {
      err << "qms: did you mean: " << e.details()["suggestions"].dump() << '\n';
    }
    return kExitFailed;
  } catch (const std::exception& e) {
    err << "qms: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitOk;
}

}  // namespace qms::cli
