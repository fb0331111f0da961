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

#include "qms/common/http.hpp"

#include <regex>

namespace qms::http {

std::string Url::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

Url parse_url(std::string_view text) {
  static const std::regex kPattern(R"(^(http)://([A-Za-z0-9.\-]+)(?::(\d{1,5}))?/?$)");
  std::cmatch m;
  if (!std::regex_match(text.begin(), text.end(), m, kPattern)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid service address: " + std::string(text));
  }
  Url url{m[1].str(), m[2].str(), 80};
  if (m[3].matched) {
    url.port = std::stoi(m[3].str());
    if (url.port < 1 || url.port > 65535) {
      throw Error(ErrorCode::kInvalidArgument, "port out of range: " + std::string(text));
    }
  }
  return url;
}

bool is_valid_url(std::string_view text) {
  try {
    parse_url(text);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& error) {
  send_json(res, http_status(error.code()), error.to_json());
}

nlohmann::json parse_json_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed JSON body: ") + e.what());
  }
}

std::string require_user(const httplib::Request& req) {
  auto user = req.get_header_value(kUserIdHeader);
  if (user.empty()) throw Error(ErrorCode::kUnauthorized, "missing user identity");
  return user;
}

std::optional<std::string> bearer_token(const httplib::Request& req) {
  const auto value = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (value.size() <= kPrefix.size() || value.compare(0, kPrefix.size(), kPrefix) != 0) {
    return std::nullopt;
  }
  return value.substr(kPrefix.size());
}

httplib::Server::Handler guarded(
    std::function<void(const httplib::Request&, httplib::Response&)> fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const nlohmann::json::exception& e) {
      send_error(res, Error(ErrorCode::kInvalidArgument, e.what()));
    } catch (const std::exception& e) {
      send_error(res, Error(ErrorCode::kInternal, e.what()));
    }
  };
}

nlohmann::json Reply::json() const {
  if (body.empty()) return nullptr;
  return nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
}

nlohmann::json Reply::json_or_throw() const {
  auto parsed = json();
  if (!ok()) throw Error::from_json(parsed, status);
  if (parsed.is_discarded()) throw Error(ErrorCode::kInternal, "upstream returned malformed JSON");
  return parsed;
}

JsonClient::JsonClient(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  parse_url(base_url_);
}

namespace {

httplib::Client make_client(const std::string& base_url, std::chrono::milliseconds timeout) {
  httplib::Client cli(parse_url(base_url).origin());
  const auto secs = timeout.count() / 1000;
  const auto usecs = (timeout.count() % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  return cli;
}

}  // namespace

Reply JsonClient::finish(httplib::Result result, std::chrono::steady_clock::time_point started,
                         const std::string& path) const {
  if (!result) {
    const auto err = result.error();
    const auto elapsed = std::chrono::steady_clock::now() - started;
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= timeout_)) {
      throw Error(ErrorCode::kTimeout, "timed out calling " + base_url_ + path);
    }
    throw Error(ErrorCode::kUnavailable,
                "cannot reach " + base_url_ + path + ": " + httplib::to_string(err));
  }
  return Reply{result->status, result->body, result->get_header_value("Content-Type")};
}

Reply JsonClient::get(const std::string& path, const httplib::Headers& headers) const {
  auto cli = make_client(base_url_, timeout_);
  const auto started = std::chrono::steady_clock::now();
  return finish(cli.Get(path, headers), started, path);
}

Reply JsonClient::post(const std::string& path, const nlohmann::json& body,
                       const httplib::Headers& headers) const {
  auto cli = make_client(base_url_, timeout_);
  const auto started = std::chrono::steady_clock::now();
  return finish(cli.Post(path, headers, body.dump(), "application/json"), started, path);
}

Reply JsonClient::del(const std::string& path, const httplib::Headers& headers) const {
  auto cli = make_client(base_url_, timeout_);
  const auto started = std::chrono::steady_clock::now();
  return finish(cli.Delete(path, headers), started, path);
}

std::string url_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

std::string with_query(std::string path,
                       const std::vector<std::pair<std::string, std::string>>& params) {
  char sep = '?';
  for (const auto& [k, v] : params) {
    if (v.empty()) continue;
    path += sep;
    path += url_encode(k) + "=" + url_encode(v);
    sep = '&';
  }
  return path;
}

}  // namespace qms::http
