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

// Runs the QMS services in one process until SIGINT or SIGTERM.
#include "qms/common/error.hpp"
#include "qms/server/service_host.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
  CLI::App app{"QMS service host"};
  std::string config_path = "config/qms.env";
  std::string services = "auth,rms,dmdgs,docgen,gateway";
  app.add_option("-c,--config", config_path, "environment file with SERVICE_* routes and settings")
      ->check(CLI::ExistingFile);
  app.add_option("-s,--services", services, "comma-separated services to run here");
  CLI11_PARSE(app, argc, argv);

  std::set<std::string> selected;
  std::istringstream in(services);
  for (std::string s; std::getline(in, s, ',');) {
    if (!s.empty()) selected.insert(s);
  }

  // Block the signals before any thread starts so that only sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    auto host = qms::server::ServiceHost::from_file(config_path, selected);
    host->start();
    for (const auto& name : selected) std::cout << name << " listening on " << host->url(name) << '\n';
    std::cout.flush();
    int sig = 0;
    sigwait(&signals, &sig);
    std::cout << "shutting down\n";
    host->stop();
  } catch (const qms::Error& e) {
    std::cerr << "qms_server: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
