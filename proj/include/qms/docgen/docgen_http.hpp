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

#include "qms/common/httplib.hpp"
#include "qms/common/time.hpp"
#include "qms/docgen/documentation.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace qms::docgen {

/// Gathers documentation inputs from the RMS and DMDGS services on behalf
/// of a user and renders them.
class DocgenService {
 public:
  DocgenService(std::string rms_url, std::string dmdgs_url, Clock clock = system_clock(),
                std::chrono::milliseconds timeout = std::chrono::seconds(30));

  /// Without `data_check_ids` every check recorded for the assessed model
  /// is included.
  Value build(const std::string& user_id, const std::string& assessment_id,
              const std::optional<std::vector<std::string>>& data_check_ids = std::nullopt) const;

 private:
  std::string rms_url_;
  std::string dmdgs_url_;
  Clock clock_;
  std::chrono::milliseconds timeout_;
};

/// GET /docgen/assessments/{id}/document?format=markdown|json[&data_checks=a,b]
void register_routes(httplib::Server& server, const DocgenService& service);

}  // namespace qms::docgen
