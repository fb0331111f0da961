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

#include "qms/gateway/route_table.hpp"

#include "qms/common/error.hpp"
#include "qms/common/http.hpp"

#include <cctype>

namespace qms::gateway {

RouteTable RouteTable::from_entries(const std::vector<EnvEntry>& entries, std::string source,
                                    Timestamp loaded_at) {
  RouteTable table;
  table.loaded_from_ = std::move(source);
  table.loaded_at_ = loaded_at;
  std::map<std::string, std::size_t> lines;
  for (const auto& e : entries) {
    if (e.key.rfind(kServicePrefix, 0) != 0) continue;
    const auto where = table.loaded_from_ + ":" + std::to_string(e.line);
    std::string prefix = e.key.substr(kServicePrefix.size());
    for (auto& c : prefix) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (prefix.empty()) throw Error(ErrorCode::kInvalidArgument, where + ": empty service name", {{"line", e.line}});
    if (!http::is_valid_url(e.value)) {
      throw Error(ErrorCode::kInvalidArgument, where + ": invalid address '" + e.value + "'", {{"line", e.line}});
    }
    if (const auto [it, fresh] = lines.emplace(prefix, e.line); !fresh) {
      throw Error(ErrorCode::kInvalidArgument,
                  where + ": duplicate prefix '" + prefix + "' (lines " + std::to_string(it->second) + " and " +
                      std::to_string(e.line) + ")",
                  {{"reason", "duplicate-prefix"}, {"prefix", prefix}, {"lines", {it->second, e.line}}});
    }
    table.entries_.emplace(prefix, http::parse_url(e.value).origin());
  }
  return table;
}

RouteTable RouteTable::load(const std::filesystem::path& path) {
  return from_entries(read_env_file(path), path.string());
}

std::optional<std::string> RouteTable::find(std::string_view prefix) const {
  auto it = entries_.find(prefix);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

}  // namespace qms::gateway
