// Copyright 2026 The SOPPI Authors.
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

#include "soppi/thread_pool.h"

#include <algorithm>
#include <exception>

namespace soppi {

ThreadPool::ThreadPool(int num_threads) {
  if (num_threads <= 0) {
    num_threads = std::max(1u, std::thread::hardware_concurrency());
  }
  workers_.reserve(num_threads);
  for (int i = 0; i < num_threads; ++i) {
    workers_.emplace_back([this] { WorkerLoop(); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    stop_ = true;
  }
  cv_.notify_all();
  for (std::thread& worker : workers_) worker.join();
}

void ThreadPool::WorkerLoop() {
  while (true) {
    std::function<void()> task;
    {
      std::unique_lock<std::mutex> lock(mutex_);
      cv_.wait(lock, [this] { return stop_ || !tasks_.empty(); });
      if (stop_ && tasks_.empty()) return;
      task = std::move(tasks_.front());
      tasks_.pop();
    }
    task();
  }
}

void ThreadPool::Run(int count, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const int blocks = std::min(count, NumThreads());
  std::mutex done_mutex;
  std::condition_variable done_cv;
  int remaining = blocks;
  std::exception_ptr error;

  {
    std::lock_guard<std::mutex> lock(mutex_);
    for (int b = 0; b < blocks; ++b) {
      const int begin = static_cast<int>(static_cast<long>(count) * b / blocks);
      const int end =
          static_cast<int>(static_cast<long>(count) * (b + 1) / blocks);
      tasks_.push([&, begin, end] {
        std::exception_ptr local;
        try {
          for (int i = begin; i < end; ++i) fn(i);
        } catch (...) {
          local = std::current_exception();
        }
        std::lock_guard<std::mutex> done_lock(done_mutex);
        if (local && !error) error = local;
        if (--remaining == 0) done_cv.notify_one();
      });
    }
  }
  cv_.notify_all();

  std::unique_lock<std::mutex> lock(done_mutex);
  done_cv.wait(lock, [&] { return remaining == 0; });
  if (error) std::rethrow_exception(error);
}

}  // namespace soppi
