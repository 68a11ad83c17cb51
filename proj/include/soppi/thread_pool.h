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

#ifndef SOPPI_THREAD_POOL_H_
#define SOPPI_THREAD_POOL_H_

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

namespace soppi {

// Fixed set of worker threads. ParallelFor below splits an index range into
// contiguous blocks; callers only write to per-index outputs, so results do
// not depend on the thread count.
class ThreadPool {
 public:
  // num_threads <= 0 selects std::thread::hardware_concurrency().
  explicit ThreadPool(int num_threads);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int NumThreads() const { return static_cast<int>(workers_.size()); }

  // Runs fn(i) for i in [0, count) and blocks until all calls returned.
  // The first exception thrown by any call is rethrown here.
  void Run(int count, const std::function<void(int)>& fn);

 private:
  void WorkerLoop();

  std::vector<std::thread> workers_;
  std::queue<std::function<void()>> tasks_;
  std::mutex mutex_;
  std::condition_variable cv_;
  bool stop_ = false;
};

template <typename F>
void ParallelFor(ThreadPool* pool, int count, F&& fn) {
  if (pool == nullptr || pool->NumThreads() <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  pool->Run(count, std::function<void(int)>(std::forward<F>(fn)));
}

}  // namespace soppi

#endif  // SOPPI_THREAD_POOL_H_
