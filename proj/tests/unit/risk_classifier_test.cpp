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
#include "qms/rms/risk_classifier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

namespace qms::rms {
namespace {

const RiskClassifier& classifier() {
  static const RiskClassifier c = RiskClassifier::bundled();
  return c;
}

SystemDescription neutral() {
  SystemDescription s;
  s.domain = "industrial process management";
  s.purpose = "information extraction";
  s.capabilities = {"text generation"};
  s.ai_user = "business";
  s.ai_subject = "no natural person";
  return s;
}

TEST(RiskClassifierTest, SocialScoringIsUnacceptable) {
  auto s = neutral();
  s.purpose = "social scoring of natural persons";
  s.ai_user = "public authority";
  s.ai_subject = "citizen";
  const auto c = classifier().classify(s);
  EXPECT_EQ(c.risk_class, RiskClass::kUnacceptable);
  EXPECT_EQ(c.rationale.front(), "prohibited-social-scoring");
}

TEST(RiskClassifierTest, SpamFilterIsMinimal) {
  auto s = neutral();
  s.domain = "email filtering";
  s.purpose = "spam detection";
  s.capabilities = {"classification"};
  s.ai_subject = "consumer";
  const auto c = classifier().classify(s);
  EXPECT_EQ(c.risk_class, RiskClass::kMinimal);
  EXPECT_EQ(c.rationale, (std::vector<std::string>{"minimal-spam-filtering"}));
}

TEST(RiskClassifierTest, CustomerServiceChatbotIsLimited) {
  auto s = neutral();
  s.domain = "retail customer service";
  s.purpose = "customer support";
  s.capabilities = {"conversational chatbot", "question answering"};
  s.ai_subject = "consumer";
  const auto c = classifier().classify(s);
  EXPECT_EQ(c.risk_class, RiskClass::kLimited);
  EXPECT_EQ(c.rationale, (std::vector<std::string>{"transparency-conversational-system"}));
}

TEST(RiskClassifierTest, HealthcareDomainIsHigh) {
  auto s = neutral();
  s.domain = "healthcare triage";
  s.ai_user = "healthcare provider";
  s.ai_subject = "patient";
  EXPECT_EQ(classifier().classify(s).risk_class, RiskClass::kHigh);
  // A chatbot inside a high-risk domain stays High; both rules are reported.
  s.capabilities = {"conversational chatbot"};
  const auto c = classifier().classify(s);
  EXPECT_EQ(c.risk_class, RiskClass::kHigh);
  EXPECT_EQ(c.rationale, (std::vector<std::string>{"high-risk-health", "transparency-conversational-system"}));
}

TEST(RiskClassifierTest, SystemicRiskThreshold) {
  auto s = neutral();
  s.domain = "general purpose";
  s.is_gpai = true;
  s.training_flops = 2e25;
  auto c = classifier().classify(s);
  EXPECT_TRUE(c.systemic_risk);
  EXPECT_EQ(c.rationale.back(), "gpai-systemic-risk");
  EXPECT_EQ(c.risk_class, RiskClass::kMinimal);  // independent of the class

  s.training_flops = 1e25;
  EXPECT_TRUE(classifier().classify(s).systemic_risk);
  s.training_flops = std::nextafter(1e25, 0.0);
  EXPECT_FALSE(classifier().classify(s).systemic_risk);
  s.training_flops = 2e25;
  s.is_gpai = false;
  EXPECT_FALSE(classifier().classify(s).systemic_risk);
  s.is_gpai = true;
  s.training_flops.reset();
  EXPECT_FALSE(classifier().classify(s).systemic_risk);
  s.training_flops = -1;
  EXPECT_THROW(classifier().classify(s), Error);
}

TEST(RiskClassifierTest, UnknownTermIsRejectedWithSuggestions) {
  auto s = neutral();
  s.capabilities = {"chatbot"};
  try {
    classifier().classify(s);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    EXPECT_EQ(e.details()["field"], "capability");
    EXPECT_EQ(e.details()["suggestions"][0], "conversational chatbot");
  }
  s = neutral();
  s.domain = "helthcare triage";
  try {
    classifier().classify(s);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.details()["suggestions"][0], "healthcare triage");
  }
}

TEST(RiskClassifierTest, EditDistance) {
  EXPECT_EQ(edit_distance("kitten", "sitting"), 3u);
  EXPECT_EQ(edit_distance("", "abc"), 3u);
  EXPECT_EQ(edit_distance("same", "same"), 0u);
}

// Random system descriptions drawn from the shipped vocabulary.
SystemDescription random_system(std::mt19937_64& rng, const Vocabulary& v) {
  auto pick = [&](std::string_view field) {
    const auto& terms = v.fields.find(field)->second;
    auto it = terms.begin();
    std::advance(it, std::uniform_int_distribution<std::size_t>(0, terms.size() - 1)(rng));
    return *it;
  };
  SystemDescription s;
  s.domain = pick(kDomain);
  s.purpose = pick(kPurpose);
  s.ai_user = pick(kAiUser);
  s.ai_subject = pick(kAiSubject);
  const int caps = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < caps; ++i) s.capabilities.push_back(pick(kCapability));
  s.is_gpai = rng() % 2;
  if (rng() % 2) s.training_flops = std::pow(10.0, std::uniform_real_distribution<double>(20, 27)(rng));
  return s;
}

// Independent evaluation: scan the raw rule file (unsorted), collect every
// firing rule and take the most severe class.
RiskClass oracle_class(const nlohmann::json& rules, const SystemDescription& s) {
  int best = -1;
  const std::map<std::string, int> severity{{"Minimal", 0}, {"Limited", 1}, {"High", 2}, {"Unacceptable", 3}};
  for (const auto& r : rules["rules"]) {
    bool all = true;
    for (const auto& [field, terms] : r["when"].items()) {
      std::vector<std::string> values;
      if (field == "capability") values = s.capabilities;
      else if (field == "domain") values = {s.domain};
      else if (field == "purpose") values = {s.purpose};
      else if (field == "ai_user") values = {s.ai_user};
      else values = {s.ai_subject};
      bool any = false;
      for (const auto& t : terms) {
        for (const auto& v : values) any = any || t == v;
      }
      all = all && any;
    }
    if (all) best = std::max(best, severity.at(r["class"]));
  }
  return best < 0 ? RiskClass::kMinimal : static_cast<RiskClass>(best);
}

nlohmann::json rules_file() {
  std::ifstream in(std::string(QMS_RESOURCE_DIR) + "/risk_rules.json");
  return nlohmann::json::parse(in);
}

TEST(RiskClassifierPropertyTest, AgreesWithOracleAndIsDeterministic) {
  const auto rules = rules_file();
  std::mt19937_64 rng(17);
  for (int i = 0; i < 2000; ++i) {
    const auto s = random_system(rng, classifier().vocabulary());
    const auto a = classifier().classify(s);
    const auto b = classifier().classify(s);
    ASSERT_EQ(a.risk_class, oracle_class(rules, s)) << s.domain << " / " << s.purpose;
    EXPECT_EQ(a.risk_class, b.risk_class);
    EXPECT_EQ(a.rationale, b.rationale);
    EXPECT_EQ(a.systemic_risk, b.systemic_risk);
    EXPECT_FALSE(a.rationale.empty());
    EXPECT_EQ(a.systemic_risk, s.is_gpai && s.training_flops && *s.training_flops >= 1e25);
  }
}

TEST(RiskClassifierPropertyTest, AddingLimitedRuleNeverChangesHigherClasses) {
  const auto& base = classifier();
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto rules = rules_file();
    // A Limited rule on a random domain and capability, appended first in
    // the file so that only the severity ordering can keep it from winning.
    const auto probe = random_system(rng, base.vocabulary());
    nlohmann::json extra = {{"name", "extra-limited"},
                            {"class", "Limited"},
                            {"when", {{"domain", {probe.domain}}}}};
    rules["rules"].insert(rules["rules"].begin(), extra);
    const RiskClassifier extended(base.vocabulary(), RuleTable::from_json(rules, base.vocabulary()));
    for (int i = 0; i < 200; ++i) {
      auto s = random_system(rng, base.vocabulary());
      if (i % 2 == 0) s.domain = probe.domain;
      const auto before = base.classify(s).risk_class;
      const auto after = extended.classify(s).risk_class;
      if (before == RiskClass::kUnacceptable || before == RiskClass::kHigh) {
        EXPECT_EQ(after, before);
      }
      EXPECT_GE(static_cast<int>(after), static_cast<int>(before));
    }
  }
}

TEST(RuleTableTest, RejectsInvalidFiles) {
  const auto& v = classifier().vocabulary();
  auto rules = rules_file();
  rules["rules"].push_back({{"name", "bad"}, {"class", "Severe"}, {"when", {{"domain", {"biometrics"}}}}});
  EXPECT_THROW(RuleTable::from_json(rules, v), Error);

  rules = rules_file();
  rules["rules"].push_back({{"name", "bad"}, {"class", "High"}, {"when", {{"domain", {"astrology"}}}}});
  EXPECT_THROW(RuleTable::from_json(rules, v), Error);

  rules = rules_file();
  rules["rules"].push_back(rules["rules"][0]);
  EXPECT_THROW(RuleTable::from_json(rules, v), Error);

  rules = rules_file();
  rules["rules"].push_back({{"name", "bad"}, {"class", "High"}, {"when", nlohmann::json::object()}});
  EXPECT_THROW(RuleTable::from_json(rules, v), Error);
}

TEST(RuleTableTest, RulesAreOrderedBySeverity) {
  const auto& rules = classifier().rules().rules;
  for (std::size_t i = 1; i < rules.size(); ++i) {
    EXPECT_GE(static_cast<int>(rules[i - 1].risk_class), static_cast<int>(rules[i].risk_class));
  }
}

}  // namespace
}  // namespace qms::rms
