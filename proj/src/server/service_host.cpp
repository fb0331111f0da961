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

#include "qms/server/service_host.hpp"

#include "qms/auth/auth_http.hpp"
#include "qms/auth/auth_service.hpp"
#include "qms/common/error.hpp"
#include "qms/common/http.hpp"
#include "qms/dmdgs/dmdgs_http.hpp"
#include "qms/dmdgs/dmdgs_service.hpp"
#include "qms/docgen/docgen_http.hpp"
#include "qms/gateway/gateway.hpp"
#include "qms/rms/rms_http.hpp"
#include "qms/rms/rms_service.hpp"

#include <algorithm>
#include <condition_variable>
#include <functional>
#include <regex>
#include <sstream>
#include <thread>

namespace qms::server {
namespace {

const std::vector<std::string> kStartOrder{"rms", "dmdgs", "docgen", "auth", "gateway"};

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Listen addresses may use port 0 for "any free port"; parse_url does not
// accept that for request targets.
std::pair<std::string, int> listen_address(const std::string& text) {
  static const std::regex any_port(R"(^http://([^:/]+):0/?$)");
  std::smatch m;
  if (std::regex_match(text, m, any_port)) return {m[1].str(), 0};
  const auto url = http::parse_url(text);
  return {url.host, url.port};
}

struct Listener {
  std::string host;
  int port = 0;
  std::unique_ptr<httplib::Server> server;
  std::thread thread;

  bool running() const { return thread.joinable(); }

  void start(const std::string& name, const std::function<void(httplib::Server&)>& mount) {
    server = std::make_unique<httplib::Server>();
    mount(*server);
    if (port == 0) {
      port = server->bind_to_any_port(host);
    } else if (!server->bind_to_port(host, port)) {
      port = -1;
    }
    if (port <= 0) throw Error(ErrorCode::kUnavailable, "cannot bind " + name + " to " + host);
    thread = std::thread([s = server.get()] { s->listen_after_bind(); });
    server->wait_until_ready();
  }

  void stop() {
    if (!running()) return;
    server->stop();
    thread.join();
    server.reset();
  }
};

}  // namespace

const std::set<std::string>& known_services() {
  static const std::set<std::string> names{"auth", "rms", "dmdgs", "docgen", "gateway"};
  return names;
}

struct ServiceHost::State {
  std::vector<EnvEntry> entries;
  std::string source;
  Config config;
  std::set<std::string> selected;

  std::map<std::string, std::unique_ptr<storage::DocumentStore>> stores;
  std::unique_ptr<rms::RmsService> rms;
  std::unique_ptr<dmdgs::DmdgsService> dmdgs;
  std::unique_ptr<docgen::DocgenService> docgen;
  std::unique_ptr<auth::HttpUserPropagator> propagator;
  std::unique_ptr<auth::AuthService> auth;
  std::unique_ptr<gateway::Gateway> gateway;
  std::map<std::string, std::function<void(httplib::Server&)>> mounts;
  std::map<std::string, Listener> listeners;

  std::thread retry_thread;
  std::mutex retry_mu;
  std::condition_variable retry_cv;
  bool stopping = false;

  std::string configured(const std::string& name) const {
    const auto key = name == "gateway" ? std::string("GATEWAY_ADDRESS") : "SERVICE_" + upper(name);
    const auto fallback = name == "gateway" ? "http://127.0.0.1:8080" : "http://127.0.0.1:0";
    return config.get_or(key, selected.contains(name) ? fallback : "");
  }

  std::string address(const std::string& name) const {
    if (auto it = listeners.find(name); it != listeners.end() && it->second.port > 0) {
      return "http://" + it->second.host + ":" + std::to_string(it->second.port);
    }
    const auto text = configured(name);
    if (text.empty()) throw Error(ErrorCode::kInvalidArgument, "no address configured for service " + name);
    const auto [host, port] = listen_address(text);
    if (port == 0) throw Error(ErrorCode::kFailedPrecondition, "service " + name + " has not been started");
    return http::parse_url(text).origin();
  }

  storage::DocumentStore& store(const std::string& name) {
    auto& s = stores[name];
    if (!s) s = std::make_unique<storage::DocumentStore>(std::filesystem::path(config.get_or("DATA_DIR", "data")) / name);
    return *s;
  }

  // Config lines with the addresses of hosted services resolved.
  std::vector<EnvEntry> route_entries(const std::vector<EnvEntry>& extra) const {
    std::vector<EnvEntry> out;
    std::set<std::string> seen;
    for (const auto& e : entries) {
      if (e.key.rfind(gateway::kServicePrefix, 0) != 0) continue;
      auto copy = e;
      std::string name = e.key.substr(gateway::kServicePrefix.size());
      for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (listeners.contains(name)) copy.value = address(name);
      seen.insert(name);
      out.push_back(std::move(copy));
    }
    std::size_t line = entries.empty() ? 0 : entries.back().line;
    for (const auto& [name, l] : listeners) {
      if (name == "gateway" || seen.contains(name)) continue;
      out.push_back({"SERVICE_" + upper(name), address(name), ++line});
    }
    for (auto e : extra) {
      e.line = ++line;
      out.push_back(std::move(e));
    }
    return out;
  }

  void start(const std::string& name) {
    auto& l = listeners[name];
    if (l.running()) return;
    if (l.host.empty()) {
      std::tie(l.host, l.port) = listen_address(configured(name));
    }
    l.start(name, mounts.at(name));
  }

  void mount_gateway(const std::vector<EnvEntry>& extra) {
    std::vector<std::string> origins;
    std::istringstream in(config.get_or("CORS_ALLOW_ORIGINS", ""));
    for (std::string o; std::getline(in, o, ',');) {
      o.erase(0, o.find_first_not_of(' '));
      o.erase(o.find_last_not_of(' ') + 1);
      if (!o.empty()) origins.push_back(o);
    }
    gateway::GatewayOptions options;
    options.upstream_timeout = std::chrono::milliseconds(config.get_int("UPSTREAM_TIMEOUT_MS", 30000));
    options.cors_origins = std::move(origins);
    gateway = std::make_unique<gateway::Gateway>(
        gateway::RouteTable::from_entries(route_entries(extra), source), std::move(options));
    mounts["gateway"] = [g = gateway.get()](httplib::Server& s) { g->register_routes(s); };
  }
};

ServiceHost::ServiceHost(std::vector<EnvEntry> config, std::string source, std::set<std::string> services)
    : state_(std::make_unique<State>()) {
  for (const auto& s : services) {
    if (!known_services().contains(s)) throw Error(ErrorCode::kInvalidArgument, "unknown service " + s);
  }
  state_->config = Config(config);
  state_->entries = std::move(config);
  state_->source = std::move(source);
  state_->selected = std::move(services);
  // Fail early on malformed or duplicate routes; port 0 is resolved at start.
  auto check = state_->entries;
  for (auto& e : check) {
    if (e.key.rfind(gateway::kServicePrefix, 0) == 0 && listen_address(e.value).second == 0) {
      e.value = "http://" + listen_address(e.value).first + ":1";
    }
  }
  gateway::RouteTable::from_entries(check, state_->source);
}

std::unique_ptr<ServiceHost> ServiceHost::from_file(const std::filesystem::path& path,
                                                    std::set<std::string> services) {
  return std::make_unique<ServiceHost>(read_env_file(path), path.string(), std::move(services));
}

ServiceHost::~ServiceHost() { stop(); }

void ServiceHost::start() {
  auto& s = *state_;
  const auto& cfg = s.config;
  for (const auto& name : kStartOrder) {
    if (!s.selected.contains(name)) continue;
    if (name == "rms") {
      const auto dir = cfg.get_or("RESOURCE_DIR", QMS_RESOURCE_DIR);
      rms::RmsOptions options;
      options.max_running_jobs = static_cast<int>(cfg.get_int("RMS_MAX_RUNNING_JOBS", 2));
      s.rms = std::make_unique<rms::RmsService>(s.store("rms"), rms::RiskClassifier::from_directory(dir), options);
      s.mounts[name] = [svc = s.rms.get()](httplib::Server& server) { rms::register_routes(server, *svc); };
    } else if (name == "dmdgs") {
      s.dmdgs = std::make_unique<dmdgs::DmdgsService>(s.store("dmdgs"), dmdgs::rms_model_lookup(s.address("rms")));
      s.mounts[name] = [svc = s.dmdgs.get()](httplib::Server& server) { dmdgs::register_routes(server, *svc); };
    } else if (name == "docgen") {
      s.docgen = std::make_unique<docgen::DocgenService>(s.address("rms"), s.address("dmdgs"));
      s.mounts[name] = [svc = s.docgen.get()](httplib::Server& server) { docgen::register_routes(server, *svc); };
    } else if (name == "auth") {
      const auto cost = cfg.get_or("AUTH_PASSWORD_COST", "interactive");
      if (cost != "interactive" && cost != "minimum") {
        throw Error(ErrorCode::kInvalidArgument, "AUTH_PASSWORD_COST must be interactive or minimum");
      }
      s.propagator = std::make_unique<auth::HttpUserPropagator>(
          std::map<std::string, std::string>{{"rms", s.address("rms")}, {"dmdgs", s.address("dmdgs")}});
      s.auth = std::make_unique<auth::AuthService>(
          s.store("auth"),
          auth::PasswordHasher(cost == "minimum" ? auth::HashCost::minimum() : auth::HashCost::interactive()),
          *s.propagator);
      s.mounts[name] = [svc = s.auth.get()](httplib::Server& server) { auth::register_routes(server, *svc); };
      const auto interval = std::chrono::milliseconds(cfg.get_int("AUTH_RETRY_INTERVAL_MS", 5000));
      s.stopping = false;
      s.retry_thread = std::thread([&s, interval] {
        std::unique_lock lock(s.retry_mu);
        while (!s.retry_cv.wait_for(lock, interval, [&s] { return s.stopping; })) {
          lock.unlock();
          try {
            s.auth->retry_pending();
          } catch (const std::exception&) {
            // Left queued; the next round tries again.
          }
          lock.lock();
        }
      });
    } else {
      s.mount_gateway({});
    }
    s.start(name);
  }
}

void ServiceHost::stop() {
  auto& s = *state_;
  {
    std::lock_guard lock(s.retry_mu);
    s.stopping = true;
  }
  s.retry_cv.notify_all();
  if (s.retry_thread.joinable()) s.retry_thread.join();
  for (auto it = kStartOrder.rbegin(); it != kStartOrder.rend(); ++it) {
    if (auto l = s.listeners.find(*it); l != s.listeners.end()) l->second.stop();
  }
  s.gateway.reset();
  s.auth.reset();
  s.propagator.reset();
  s.docgen.reset();
  s.dmdgs.reset();
  s.rms.reset();
}

void ServiceHost::stop_service(const std::string& name) {
  auto it = state_->listeners.find(name);
  if (it == state_->listeners.end()) throw Error(ErrorCode::kNotFound, "service " + name + " is not hosted here");
  it->second.stop();
}

void ServiceHost::start_service(const std::string& name) {
  if (!state_->mounts.contains(name)) throw Error(ErrorCode::kNotFound, "service " + name + " is not hosted here");
  state_->start(name);
}

void ServiceHost::restart_gateway(const std::vector<EnvEntry>& extra) {
  auto& s = *state_;
  if (!s.listeners.contains("gateway")) throw Error(ErrorCode::kNotFound, "gateway is not hosted here");
  s.listeners["gateway"].stop();
  s.mount_gateway(extra);
  s.start("gateway");
}

std::string ServiceHost::url(const std::string& name) const { return state_->address(name); }

const gateway::RouteTable& ServiceHost::routes() const {
  if (!state_->gateway) throw Error(ErrorCode::kFailedPrecondition, "gateway is not running");
  return state_->gateway->routes();
}

auth::AuthService* ServiceHost::auth() const { return state_->auth.get(); }
rms::RmsService* ServiceHost::rms() const { return state_->rms.get(); }
dmdgs::DmdgsService* ServiceHost::dmdgs() const { return state_->dmdgs.get(); }

}  // namespace qms::server
