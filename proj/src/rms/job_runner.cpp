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

#include "qms/rms/job_runner.hpp"

#include "qms/common/error.hpp"

namespace qms::rms {

JobRunner::JobRunner(int workers, Execute execute) : execute_(std::move(execute)) {
  if (workers < 1) throw Error(ErrorCode::kInvalidArgument, "job runner needs at least one worker");
  for (int i = 0; i < workers; ++i) threads_.emplace_back([this] { work(); });
}

JobRunner::~JobRunner() { shutdown(); }

void JobRunner::submit(std::string job_id) {
  {
    std::lock_guard lock(mu_);
    if (stopping_) throw Error(ErrorCode::kUnavailable, "job runner is shutting down");
    queue_.push_back(std::move(job_id));
  }
  work_cv_.notify_one();
}

void JobRunner::wait_idle() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [this] { return queue_.empty() && running_ == 0; });
}

void JobRunner::shutdown() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
    queue_.clear();
  }
  work_cv_.notify_all();
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  idle_cv_.notify_all();
}

int JobRunner::running() const {
  std::lock_guard lock(mu_);
  return running_;
}

int JobRunner::peak_running() const {
  std::lock_guard lock(mu_);
  return peak_;
}

void JobRunner::work() {
  for (;;) {
    std::string job;
    {
      std::unique_lock lock(mu_);
      work_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      job = std::move(queue_.front());
      queue_.pop_front();
      peak_ = std::max(peak_, ++running_);
    }
    try {
      execute_(job);
    } catch (...) {
      // execute_ records its own failures; nothing may escape a worker.
    }
    {
      std::lock_guard lock(mu_);
      --running_;
    }
    idle_cv_.notify_all();
  }
}

}  // namespace qms::rms
