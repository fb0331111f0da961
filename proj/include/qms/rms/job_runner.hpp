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

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qms::rms {

/// Fixed pool of workers draining a FIFO of job ids. At most `workers` jobs
/// execute at any moment.
class JobRunner {
 public:
  using Execute = std::function<void(const std::string& job_id)>;

  JobRunner(int workers, Execute execute);
  ~JobRunner();
  JobRunner(const JobRunner&) = delete;
  JobRunner& operator=(const JobRunner&) = delete;

  void submit(std::string job_id);
  /// Blocks until the queue is empty and no job is executing.
  void wait_idle();
  /// Finishes executing jobs, drops queued ones and joins the workers.
  void shutdown();

  int running() const;
  /// Highest number of simultaneously executing jobs observed.
  int peak_running() const;

 private:
  void work();

  Execute execute_;
  mutable std::mutex mu_;
  std::condition_variable work_cv_;
  std::condition_variable idle_cv_;
  std::deque<std::string> queue_;
  int running_ = 0;
  int peak_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

}  // namespace qms::rms
