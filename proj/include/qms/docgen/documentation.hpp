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

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace qms::docgen {

using Value = nlohmann::json;

inline constexpr const char* kDocumentVersion = "1.0";
inline constexpr const char* kGeneratedAtPrefix = "Generated at: ";

/// The eight mandatory section headings, in order, without the "## " marker.
const std::vector<std::string>& section_titles();

/// Builds the structured document from an RMS assessment bundle
/// ({"assessment", "identification", "analysis", "model", "dataset",
/// "mitigations"}) and DMDGS data-check entries ({"reference", "check"}).
/// Throws kFailedPrecondition (reason analysis-incomplete) unless the
/// analysis is Done. The result contains only finite numbers, so it
/// survives a storage round trip unchanged.
Value build_documentation(const Value& bundle, const std::vector<Value>& data_checks, Timestamp generated_at);

/// Markdown rendering of a structured document: UTF-8, LF line endings.
/// The only line that depends on the generation time starts with
/// kGeneratedAtPrefix. Reals are shown with 6 significant digits.
std::string render_markdown(const Value& document);

/// Display rule for reals: printf "%.6g"; integers print exactly;
/// "Infinity"/"-Infinity" strings pass through.
std::string format_number(const Value& value);

}  // namespace qms::docgen
