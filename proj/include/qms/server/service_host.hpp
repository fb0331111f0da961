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
#include "qms/gateway/route_table.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace qms::auth {
class AuthService;
}
namespace qms::rms {
class RmsService;
}
namespace qms::dmdgs {
class DmdgsService;
}

namespace qms::server {

/// Services a host can run: auth, rms, dmdgs, docgen and gateway.
const std::set<std::string>& known_services();

/// Runs some or all services in one process, each on its own listener.
///
/// Configuration keys (environment-file syntax):
///   DATA_DIR                  root of the per-service stores (default ./data)
///   SERVICE_<NAME>=<url>      where each service listens; port 0 picks a
///                             free port. Entries for services this host
///                             does not run are only used as routes.
///   GATEWAY_ADDRESS           gateway listen address (default http://127.0.0.1:8080)
///   CORS_ALLOW_ORIGINS        comma-separated origins, or *
///   UPSTREAM_TIMEOUT_MS       gateway upstream timeout (default 30000)
///   RMS_MAX_RUNNING_JOBS      concurrent analysis jobs (default 2)
///   AUTH_PASSWORD_COST        interactive (default) or minimum
///   AUTH_RETRY_INTERVAL_MS    background propagation retry period (default 5000)
class ServiceHost {
 public:
  ServiceHost(std::vector<EnvEntry> config, std::string source = "<config>",
              std::set<std::string> services = known_services());
  static std::unique_ptr<ServiceHost> from_file(const std::filesystem::path& path,
                                                std::set<std::string> services = known_services());
  ~ServiceHost();
  ServiceHost(const ServiceHost&) = delete;
  ServiceHost& operator=(const ServiceHost&) = delete;

  /// Binds and starts every selected service in dependency order.
  void start();
  void stop();

  /// Stops one listener and starts it again on the same port. State lives
  /// in the stores, so nothing is lost.
  void stop_service(const std::string& name);
  void start_service(const std::string& name);
  /// Restarts the gateway with `extra` config lines added to its routes.
  void restart_gateway(const std::vector<EnvEntry>& extra = {});

  /// Resolved base address of a service (after port-0 binding).
  std::string url(const std::string& name) const;
  std::string gateway_url() const { return url("gateway"); }
  const gateway::RouteTable& routes() const;

  auth::AuthService* auth() const;
  rms::RmsService* rms() const;
  dmdgs::DmdgsService* dmdgs() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace qms::server
