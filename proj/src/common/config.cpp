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

#include "qms/common/config.hpp"

#include "qms/common/error.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace qms {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  const auto first = static_cast<unsigned char>(key.front());
  if (!std::isalpha(first) && first != '_') return false;
  for (char c : key) {
    const auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && u != '_') return false;
  }
  return true;
}

}  // namespace

std::vector<EnvEntry> parse_env(std::string_view text, std::string_view source) {
  std::vector<EnvEntry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(source) + ":" + std::to_string(line_no) + ": expected KEY=VALUE",
                  {{"line", line_no}});
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (!valid_key(key)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(source) + ":" + std::to_string(line_no) + ": invalid key '" +
                      std::string(key) + "'",
                  {{"line", line_no}});
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    entries.push_back({std::string(key), std::string(value), line_no});
  }
  return entries;
}

std::vector<EnvEntry> read_env_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kUnavailable, "cannot read config file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_env(buf.str(), path.string());
}

Config::Config(const std::vector<EnvEntry>& entries) {
  for (const auto& e : entries) values_[e.key] = e.value;
}

Config Config::from_file(const std::filesystem::path& path) {
  return Config(read_env_file(path));
}

std::optional<std::string> Config::get(std::string_view key) const {
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  return std::nullopt;
}

std::string Config::get_or(std::string_view key, std::string_view fallback) const {
  auto v = get(key);
  return v ? *v : std::string(fallback);
}

long long Config::get_int(std::string_view key, long long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const long long parsed = std::stoll(*v, &used);
    if (used == v->size()) return parsed;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument,
              "config key " + std::string(key) + " is not an integer: " + *v);
}

double Config::get_double(std::string_view key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const double parsed = std::stod(*v, &used);
    if (used == v->size()) return parsed;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument,
              "config key " + std::string(key) + " is not a number: " + *v);
}

void Config::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

std::string Config::to_env() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

}  // namespace qms
