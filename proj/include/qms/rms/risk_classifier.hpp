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

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace qms::rms {

enum class RiskClass { kMinimal = 0, kLimited = 1, kHigh = 2, kUnacceptable = 3 };

std::string_view to_string(RiskClass c);
std::optional<RiskClass> parse_risk_class(std::string_view text);

/// The five descriptive fields of an AI system.
inline constexpr std::string_view kDomain = "domain";
inline constexpr std::string_view kPurpose = "purpose";
inline constexpr std::string_view kCapability = "capability";
inline constexpr std::string_view kAiUser = "ai_user";
inline constexpr std::string_view kAiSubject = "ai_subject";

/// Allowed terms per field.
struct Vocabulary {
  std::string version;
  std::map<std::string, std::set<std::string>, std::less<>> fields;

  static Vocabulary from_json(const nlohmann::json& j);
  bool contains(std::string_view field, std::string_view term) const;
  /// Closest terms of `field` to `term` by edit distance (at most `limit`).
  std::vector<std::string> suggestions(std::string_view field, std::string_view term,
                                       std::size_t limit = 3) const;
};

/// A rule fires when, for every field in `when`, the system's value is one
/// of the listed terms (for capabilities: any of the system's capabilities).
struct RiskRule {
  std::string name;
  RiskClass risk_class = RiskClass::kMinimal;
  std::string description;
  std::map<std::string, std::set<std::string>, std::less<>> when;
};

struct RuleTable {
  std::string version;
  RiskRule fallback;  // reported when nothing fires
  /// Sorted by decreasing severity; file order within a class.
  std::vector<RiskRule> rules;

  /// Validates names, classes and that every term exists in `vocabulary`.
  static RuleTable from_json(const nlohmann::json& j, const Vocabulary& vocabulary);
};

struct SystemDescription {
  std::string domain;
  std::string purpose;
  std::vector<std::string> capabilities;
  std::string ai_user;
  std::string ai_subject;
  bool is_gpai = false;
  std::optional<double> training_flops;
};

struct Classification {
  RiskClass risk_class = RiskClass::kMinimal;
  bool systemic_risk = false;
  /// Every fired rule in evaluation order, then `gpai-systemic-risk` when it
  /// applies; the fallback rule name when nothing fired. Never empty.
  std::vector<std::string> rationale;
};

/// Training compute at or above which a general-purpose model carries
/// systemic risk.
inline constexpr double kSystemicRiskFlops = 1e25;

class RiskClassifier {
 public:
  RiskClassifier(Vocabulary vocabulary, RuleTable rules);
  /// Loads `vocab.json` and `risk_rules.json` from `dir`.
  static RiskClassifier from_directory(const std::filesystem::path& dir);
  /// The files shipped with the build.
  static RiskClassifier bundled();

  /// kInvalidArgument for a term outside the vocabulary (details carry the
  /// field, the term and suggestions) or a negative/non-finite FLOP count.
  Classification classify(const SystemDescription& system) const;

  const Vocabulary& vocabulary() const { return vocabulary_; }
  const RuleTable& rules() const { return rules_; }

 private:
  void check_term(std::string_view field, const std::string& term) const;

  Vocabulary vocabulary_;
  RuleTable rules_;
};

/// Levenshtein distance over bytes.
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace qms::rms
