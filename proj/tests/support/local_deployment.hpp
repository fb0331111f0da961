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
#include "qms/server/service_host.hpp"
#include "support/temp_dir.hpp"

#include <memory>
#include <string>
#include <vector>

namespace qms::testing {

/// All services on ephemeral loopback ports with a throwaway data directory.
class LocalDeployment {
 public:
  explicit LocalDeployment(const std::string& extra_config = "") {
    const auto text = "DATA_DIR=" + data_.path().string() +
                      "\n"
                      "SERVICE_AUTH=http://127.0.0.1:0\n"
                      "SERVICE_RMS=http://127.0.0.1:0\n"
                      "SERVICE_DMDGS=http://127.0.0.1:0\n"
                      "SERVICE_DOCGEN=http://127.0.0.1:0\n"
                      "GATEWAY_ADDRESS=http://127.0.0.1:0\n"
                      "AUTH_PASSWORD_COST=minimum\n"
                      "AUTH_RETRY_INTERVAL_MS=3600000\n" +
                      extra_config;
    host_ = std::make_unique<server::ServiceHost>(parse_env(text, "deployment.env"), "deployment.env");
    host_->start();
  }

  server::ServiceHost& host() { return *host_; }
  std::string gateway_url() const { return host_->gateway_url(); }
  const std::filesystem::path& data_dir() const { return data_.path(); }

 private:
  TempDir data_;
  std::unique_ptr<server::ServiceHost> host_;
};

}  // namespace qms::testing
