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

#include "qms/rms/risk_classifier.hpp"

#include "qms/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace qms::rms {
namespace {

const std::vector<std::string_view> kFields{kDomain, kPurpose, kCapability, kAiUser, kAiSubject};

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kUnavailable, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
}

RiskRule parse_rule(const nlohmann::json& j, const Vocabulary& vocabulary, bool needs_conditions) {
  RiskRule rule;
  rule.name = j.at("name").get<std::string>();
  if (rule.name.empty()) throw Error(ErrorCode::kInvalidArgument, "rule without a name");
  const auto cls = j.at("class").get<std::string>();
  const auto parsed = parse_risk_class(cls);
  if (!parsed) throw Error(ErrorCode::kInvalidArgument, "rule " + rule.name + ": unknown class " + cls);
  rule.risk_class = *parsed;
  rule.description = j.value("description", "");
  if (!needs_conditions) return rule;
  const auto& when = j.at("when");
  if (!when.is_object() || when.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "rule " + rule.name + ": empty condition");
  }
  for (const auto& [field, terms] : when.items()) {
    if (!vocabulary.fields.contains(field)) {
      throw Error(ErrorCode::kInvalidArgument, "rule " + rule.name + ": unknown field " + field);
    }
    auto& set = rule.when[field];
    for (const auto& t : terms) {
      const auto term = t.get<std::string>();
      if (!vocabulary.contains(field, term)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "rule " + rule.name + ": '" + term + "' is not a " + field + " term");
      }
      set.insert(term);
    }
    if (set.empty()) throw Error(ErrorCode::kInvalidArgument, "rule " + rule.name + ": empty term list");
  }
  return rule;
}

bool fires(const RiskRule& rule, const SystemDescription& s) {
  for (const auto& [field, terms] : rule.when) {
    bool hit = false;
    if (field == kCapability) {
      hit = std::any_of(s.capabilities.begin(), s.capabilities.end(),
                        [&](const std::string& c) { return terms.contains(c); });
    } else if (field == kDomain) {
      hit = terms.contains(s.domain);
    } else if (field == kPurpose) {
      hit = terms.contains(s.purpose);
    } else if (field == kAiUser) {
      hit = terms.contains(s.ai_user);
    } else if (field == kAiSubject) {
      hit = terms.contains(s.ai_subject);
    }
    if (!hit) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(RiskClass c) {
  switch (c) {
    case RiskClass::kMinimal: return "Minimal";
    case RiskClass::kLimited: return "Limited";
    case RiskClass::kHigh: return "High";
    case RiskClass::kUnacceptable: return "Unacceptable";
  }
  return "Minimal";
}

std::optional<RiskClass> parse_risk_class(std::string_view text) {
  for (auto c : {RiskClass::kMinimal, RiskClass::kLimited, RiskClass::kHigh, RiskClass::kUnacceptable}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  Vocabulary v;
  v.version = j.value("version", "");
  for (auto field : kFields) {
    const auto& terms = j.at("fields").at(std::string(field));
    auto& set = v.fields[std::string(field)];
    for (const auto& t : terms) set.insert(t.get<std::string>());
    if (set.empty()) throw Error(ErrorCode::kInvalidArgument, "vocabulary field " + std::string(field) + " is empty");
  }
  return v;
}

bool Vocabulary::contains(std::string_view field, std::string_view term) const {
  auto it = fields.find(field);
  return it != fields.end() && it->second.contains(std::string(term));
}

std::vector<std::string> Vocabulary::suggestions(std::string_view field, std::string_view term,
                                                 std::size_t limit) const {
  auto it = fields.find(field);
  if (it == fields.end()) return {};
  std::vector<std::pair<std::size_t, std::string>> ranked;
  for (const auto& candidate : it->second) {
    // Substring matches rank first: "chatbot" should suggest "conversational chatbot".
    const bool contains = !term.empty() && candidate.find(term) != std::string::npos;
    ranked.emplace_back(contains ? 0 : 1 + edit_distance(term, candidate), candidate);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < limit; ++i) out.push_back(ranked[i].second);
  return out;
}

RuleTable RuleTable::from_json(const nlohmann::json& j, const Vocabulary& vocabulary) {
  RuleTable t;
  t.version = j.value("version", "");
  t.fallback = parse_rule(j.at("default"), vocabulary, false);
  std::set<std::string> names{t.fallback.name};
  for (const auto& r : j.at("rules")) {
    auto rule = parse_rule(r, vocabulary, true);
    if (!names.insert(rule.name).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate rule name " + rule.name);
    }
    t.rules.push_back(std::move(rule));
  }
  std::stable_sort(t.rules.begin(), t.rules.end(),
                   [](const RiskRule& a, const RiskRule& b) { return a.risk_class > b.risk_class; });
  return t;
}

RiskClassifier::RiskClassifier(Vocabulary vocabulary, RuleTable rules)
    : vocabulary_(std::move(vocabulary)), rules_(std::move(rules)) {}

RiskClassifier RiskClassifier::from_directory(const std::filesystem::path& dir) {
  auto vocabulary = Vocabulary::from_json(read_json(dir / "vocab.json"));
  auto rules = RuleTable::from_json(read_json(dir / "risk_rules.json"), vocabulary);
  return RiskClassifier(std::move(vocabulary), std::move(rules));
}

RiskClassifier RiskClassifier::bundled() { return from_directory(QMS_RESOURCE_DIR); }

void RiskClassifier::check_term(std::string_view field, const std::string& term) const {
  if (vocabulary_.contains(field, term)) return;
  throw Error(ErrorCode::kInvalidArgument,
              "'" + term + "' is not a known " + std::string(field) + " term",
              {{"reason", "unknown-vocabulary-term"},
               {"field", field},
               {"term", term},
               {"suggestions", vocabulary_.suggestions(field, term)}});
}

Classification RiskClassifier::classify(const SystemDescription& s) const {
  check_term(kDomain, s.domain);
  check_term(kPurpose, s.purpose);
  for (const auto& c : s.capabilities) check_term(kCapability, c);
  check_term(kAiUser, s.ai_user);
  check_term(kAiSubject, s.ai_subject);
  if (s.training_flops && (!std::isfinite(*s.training_flops) || *s.training_flops < 0)) {
    throw Error(ErrorCode::kInvalidArgument, "training_flops must be a non-negative number");
  }

  Classification out;
  bool any = false;
  for (const auto& rule : rules_.rules) {
    if (!fires(rule, s)) continue;
    if (!any) out.risk_class = rule.risk_class;  // rules are in severity order
    any = true;
    out.rationale.push_back(rule.name);
  }
  if (!any) {
    out.risk_class = rules_.fallback.risk_class;
    out.rationale.push_back(rules_.fallback.name);
  }
  out.systemic_risk = s.is_gpai && s.training_flops && *s.training_flops >= kSystemicRiskFlops;
  if (out.systemic_risk) out.rationale.push_back("gpai-systemic-risk");
  return out;
}

}  // namespace qms::rms
