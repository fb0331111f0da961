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

#include "qms/docgen/documentation.hpp"

#include "qms/common/error.hpp"

#include <cstdio>
#include <sstream>

namespace qms::docgen {
namespace {

const std::vector<std::string> kCategories{"performance", "explainability", "consistency"};

std::string cell(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n') {
      out += ' ';
    } else if (c != '\r') {
      out += c;
    }
  }
  return out;
}

std::string text_of(const Value& v) {
  if (v.is_string()) return v.get<std::string>().empty() ? "(empty)" : v.get<std::string>();
  if (v.is_number()) return format_number(v);
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_null()) return "n/a";
  if (v.is_array() && std::all_of(v.begin(), v.end(), [](const Value& e) { return e.is_string(); })) {
    std::string out;
    for (const auto& e : v) out += (out.empty() ? "" : ", ") + e.get<std::string>();
    return out.empty() ? "none" : out;
  }
  return v.dump();
}

std::string field(const Value& obj, const char* key) {
  return obj.contains(key) ? text_of(obj[key]) : "n/a";
}

void table(std::ostream& out, const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows) {
  out << '|';
  for (const auto& h : header) out << ' ' << h << " |";
  out << "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& row : rows) {
    out << '|';
    for (const auto& c : row) out << ' ' << cell(c) << " |";
    out << '\n';
  }
  out << '\n';
}

// Every leaf of a value tree as (dotted path, display text).
void flatten(const Value& v, const std::string& path, std::vector<std::vector<std::string>>& rows) {
  if (v.is_object() && !v.empty()) {
    for (const auto& [k, child] : v.items()) flatten(child, path.empty() ? k : path + "." + k, rows);
  } else if (v.is_array() && !v.empty() && !(v[0].is_string())) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], path + "[" + std::to_string(i) + "]", rows);
  } else {
    rows.push_back({path.empty() ? "value" : path, text_of(v)});
  }
}

std::string summary(const std::string& name, const Value& entry) {
  if (entry.value("status", "") != "ok") return entry.value("error", "");
  const auto& v = entry["value"];
  if (v.is_number() || v.is_string()) return format_number(v);
  if (name == "rouge" && v.is_object()) {
    std::string out;
    for (const auto& [n, s] : v.items()) {
      out += (out.empty() ? "" : "; ") + ("ROUGE-" + n + " F1 " + format_number(s.value("f1", Value())));
    }
    return out;
  }
  if (name == "saliency" && v.is_array()) return std::to_string(v.size()) + " saliency map(s)";
  if (name == "adversarial" && v.is_array()) {
    int fooled = 0;
    for (const auto& r : v) fooled += r.value("fooled", false) ? 1 : 0;
    return "fooled " + std::to_string(fooled) + " of " + std::to_string(v.size());
  }
  return "see details";
}

void metric_details(std::ostream& out, const std::string& name, const Value& entry) {
  out << "#### " << name << "\n\n";
  const auto status = entry.value("status", "failed");
  if (status != "ok") {
    out << "Status: " << status << ". " << entry.value("error", "") << "\n\n";
    return;
  }
  const auto& v = entry["value"];
  if (name == "rouge" && v.is_object()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [n, s] : v.items()) {
      rows.push_back({n, field(s, "precision"), field(s, "recall"), field(s, "f1")});
    }
    table(out, {"n", "precision", "recall", "f1"}, rows);
  } else if (name == "saliency" && v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& m = v[i];
      out << "Pair " << i + 1 << " input: " << field(m, "input") << "\n\n"
          << "generated_output: " << field(m, "generated_output") << "\n\n";
      std::vector<std::vector<std::string>> rows;
      for (const auto& t : m.value("tokens", Value::array())) {
        rows.push_back({field(t, "text"), field(t, "token"), field(t, "begin"), field(t, "end"), field(t, "raw"),
                        field(t, "normalized")});
      }
      table(out, {"text", "token", "begin", "end", "raw", "normalized"}, rows);
    }
  } else if (name == "adversarial" && v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::vector<std::vector<std::string>> rows;
      for (const auto& [k, x] : v[i].items()) rows.push_back({k, text_of(x)});
      out << "Pair " << i + 1 << ":\n\n";
      table(out, {"Field", "Value"}, rows);
    }
  } else {
    std::vector<std::vector<std::string>> rows;
    flatten(v, "", rows);
    table(out, {"Key", "Value"}, rows);
  }
}

}  // namespace

const std::vector<std::string>& section_titles() {
  static const std::vector<std::string> titles{
      "1. System description & intended purpose",
      "2. Model descriptor",
      "3. Risk class & rationale",
      "4. Verification data",
      "5. Risk-analysis results",
      "6. Data management & governance",
      "7. Mitigation measures",
      "8. Versioning & timestamps",
  };
  return titles;
}

std::string format_number(const Value& value) {
  if (value.is_number_integer() || value.is_number_unsigned()) return value.dump();
  if (value.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value.get<double>());
    return buf;
  }
  if (value.is_string()) return value.get<std::string>();
  return text_of(value);
}

Value build_documentation(const Value& bundle, const std::vector<Value>& data_checks, Timestamp generated_at) {
  for (const char* key : {"assessment", "identification", "analysis", "model", "dataset"}) {
    if (!bundle.contains(key) || !bundle[key].is_object()) {
      throw Error(ErrorCode::kInvalidArgument, std::string("assessment bundle lacks '") + key + "'");
    }
  }
  const auto& analysis = bundle["analysis"];
  if (analysis.value("status", "") != "Done") {
    throw Error(ErrorCode::kFailedPrecondition, "analysis is not Done",
                {{"reason", "analysis-incomplete"}, {"status", analysis.value("status", "")}});
  }
  const auto& id = bundle["identification"];
  auto checks = Value::array();
  for (const auto& c : data_checks) checks.push_back(c);
  return {{"document_version", kDocumentVersion},
          {"generated_at", format_timestamp(generated_at)},
          {"assessment", bundle["assessment"]},
          {"sections", section_titles()},
          {"system", id},
          {"model", bundle["model"]},
          {"risk",
           {{"risk_class", id.value("risk_class", "")},
            {"systemic_risk", id.value("systemic_risk", false)},
            {"rationale", id.value("rationale", Value::array())},
            {"vocabulary_version", id.value("vocabulary_version", "")},
            {"rules_version", id.value("rules_version", "")}}},
          {"verification_data", bundle["dataset"]},
          {"analysis", analysis},
          {"data_checks", std::move(checks)},
          {"mitigations", bundle.value("mitigations", Value::array())}};
}

std::string render_markdown(const Value& doc) {
  std::ostringstream out;
  const auto& titles = section_titles();
  auto section = [&](std::size_t i) { out << "## " << titles[i] << "\n\n"; };
  const auto& system = doc["system"];
  const auto& model = doc["model"];
  const auto& analysis = doc["analysis"];

  out << "# Technical documentation: " << field(model, "name") << "\n\n"
      << "Assessment " << field(doc["assessment"], "id") << ", document version "
      << field(doc, "document_version") << ".\n\n";

  section(0);
  table(out, {"Field", "Value"},
        {{"Domain", field(system, "domain")},
         {"Intended purpose", field(system, "purpose")},
         {"Capabilities", field(system, "capabilities")},
         {"AI user", field(system, "ai_user")},
         {"Affected persons", field(system, "ai_subject")},
         {"General-purpose AI model", field(system, "is_gpai")},
         {"Training compute (FLOPs)", system.value("training_flops", Value()).is_null()
                                          ? std::string("not stated")
                                          : field(system, "training_flops")}});

  section(1);
  {
    std::vector<std::vector<std::string>> rows{{"Name", field(model, "name")},
                                               {"Kind", field(model, "kind")},
                                               {"Model id", field(model, "id")}};
    for (const auto& [k, v] : model.items()) {
      if (k == "name" || k == "kind" || k == "id" || k == "user_id" || k == "created_at") continue;
      std::vector<std::vector<std::string>> leaves;
      flatten(v, k, leaves);
      rows.insert(rows.end(), leaves.begin(), leaves.end());
    }
    table(out, {"Field", "Value"}, rows);
  }

  section(2);
  const auto& risk = doc["risk"];
  out << "Risk class: **" << field(risk, "risk_class") << "**\n\n"
      << "Systemic risk (general-purpose AI): " << field(risk, "systemic_risk") << "\n\n"
      << "Rules that fired, most severe first:\n\n";
  for (const auto& r : risk.value("rationale", Value::array())) out << "- " << text_of(r) << '\n';
  out << '\n';

  section(3);
  const auto& data = doc["verification_data"];
  const auto pairs = data.value("pairs", Value::array());
  out << "Dataset " << field(data, "name") << " (" << field(data, "id") << "), domain "
      << field(data, "domain") << ", task " << field(data, "task") << ", " << pairs.size() << " pair(s).\n\n";
  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      rows.push_back({std::to_string(i + 1), field(pairs[i], "input"), field(pairs[i], "expected_output")});
    }
    table(out, {"#", "Input", "Expected output"}, rows);
  }

  section(4);
  const auto results = analysis.value("results", Value::object());
  std::vector<std::string> order;
  for (const auto& m : analysis.value("selected_metrics", Value::array())) {
    if (results.contains(m.get<std::string>())) order.push_back(m.get<std::string>());
  }
  for (const auto& [name, entry] : results.items()) {
    if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
  }
  const auto params = analysis.value("params", Value::object());
  out << "Analysis " << field(analysis, "id") << ", parameters:";
  for (const auto& [k, v] : params.items()) out << ' ' << k << '=' << text_of(v);
  out << ".\n\n";
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& name : order) {
      const auto& e = results[name];
      rows.push_back({name, e.value("category", "unknown"), e.value("status", "failed"), summary(name, e)});
    }
    table(out, {"Metric", "Category", "Status", "Result"}, rows);
  }
  auto categories = kCategories;
  for (const auto& name : order) {
    const auto c = results[name].value("category", "unknown");
    if (std::find(categories.begin(), categories.end(), c) == categories.end()) categories.push_back(c);
  }
  for (const auto& category : categories) {
    std::string heading = category;
    heading[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(heading[0])));
    out << "### " << heading << "\n\n";
    bool any = false;
    for (const auto& name : order) {
      if (results[name].value("category", "unknown") != category) continue;
      metric_details(out, name, results[name]);
      any = true;
    }
    if (!any) out << "No " << category << " metric was selected.\n\n";
  }

  section(5);
  const auto& checks = doc["data_checks"];
  if (checks.empty()) {
    out << "No data checks recorded for this model.\n\n";
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : checks) {
      const auto& r = c["reference"];
      rows.push_back({field(r, "dataset_name"), field(r, "split"), field(r, "origin"), field(r, "data_type"),
                      field(r, "domain"), field(r["size"], "value") + " " + field(r["size"], "unit"),
                      field(c["check"], "compliance_reference"), field(c["check"], "checked_at")});
    }
    table(out, {"Dataset", "Split", "Origin", "Type", "Domain", "Size", "Compliance reference", "Checked at"}, rows);
  }

  section(6);
  const auto& mitigations = doc["mitigations"];
  if (mitigations.empty()) {
    out << "none recorded\n\n";
  } else {
    for (std::size_t i = 0; i < mitigations.size(); ++i) {
      out << i + 1 << ". " << field(mitigations[i], "description") << " (recorded "
          << field(mitigations[i], "created_at") << ")\n";
    }
    out << '\n';
  }

  section(7);
  table(out, {"Item", "Value"},
        {{"Document version", field(doc, "document_version")},
         {"Assessment created", field(doc["assessment"], "created_at")},
         {"Identification created", field(system, "created_at")},
         {"Analysis created", field(analysis, "created_at")},
         {"Model registered", field(model, "created_at")},
         {"Vocabulary version", field(risk, "vocabulary_version")},
         {"Rule table version", field(risk, "rules_version")}});
  out << kGeneratedAtPrefix << field(doc, "generated_at") << '\n';
  return out.str();
}

}  // namespace qms::docgen
