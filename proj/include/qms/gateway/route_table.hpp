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

#include "qms/common/config.hpp"
#include "qms/common/time.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qms::gateway {

inline constexpr std::string_view kServicePrefix = "SERVICE_";

/// Route prefix -> service base address, read from `SERVICE_<NAME>=<url>`
/// lines. Other keys are ignored so the gateway can share a config file
/// with the services. Immutable once loaded.
class RouteTable {
 public:
  /// Throws kInvalidArgument for an empty name, an invalid address or a
  /// duplicate prefix (naming both lines).
  static RouteTable from_entries(const std::vector<EnvEntry>& entries, std::string source = "<text>",
                                 Timestamp loaded_at = system_clock()());
  static RouteTable load(const std::filesystem::path& path);

  std::optional<std::string> find(std::string_view prefix) const;
  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }
  const std::string& loaded_from() const { return loaded_from_; }
  Timestamp loaded_at() const { return loaded_at_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
  std::string loaded_from_;
  Timestamp loaded_at_{};
};

}  // namespace qms::gateway
