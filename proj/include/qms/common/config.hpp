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

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qms {

/// One `KEY=VALUE` line of an environment file, with its 1-based line number.
struct EnvEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Parses environment-file text: `KEY=VALUE` lines, `#` comments, blank
/// lines. Keys match `[A-Za-z_][A-Za-z0-9_]*`; values may be wrapped in
/// double quotes. Malformed lines throw kInvalidArgument naming the line.
std::vector<EnvEntry> parse_env(std::string_view text, std::string_view source = "<text>");
std::vector<EnvEntry> read_env_file(const std::filesystem::path& path);

/// Key/value view over an environment file; later duplicates win.
class Config {
 public:
  Config() = default;
  explicit Config(const std::vector<EnvEntry>& entries);
  static Config from_file(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
  std::string get_or(std::string_view key, std::string_view fallback) const;
  long long get_int(std::string_view key, long long fallback) const;
  double get_double(std::string_view key, double fallback) const;
  void set(std::string key, std::string value);

  const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

  /// Serializes back to environment-file text (sorted by key).
  std::string to_env() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace qms
