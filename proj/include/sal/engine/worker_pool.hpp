/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#ifndef SAL_ENGINE_WORKER_POOL_HPP
#define SAL_ENGINE_WORKER_POOL_HPP

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sal::engine {

/**
 * Fixed set of threads that run one task per worker index and then wait for
 * the next round.  Worker 0 is the calling thread.
 */
class WorkerPool {
public:
  explicit WorkerPool(std::size_t workers);
  ~WorkerPool();

  WorkerPool(WorkerPool const&) = delete;
  WorkerPool& operator=(WorkerPool const&) = delete;

  std::size_t size() const noexcept { return threads_.size() + 1; }

  /// Runs task(i) for every worker i and returns when all are done.
  /// Rethrows the first exception thrown by a task.
  void run(std::function<void(std::size_t)> const& task);

private:
  void loop(std::size_t index);

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_;
  std::condition_variable done_;
  std::function<void(std::size_t)> const* task_ = nullptr;
  std::size_t generation_ = 0;
  std::size_t remaining_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

} // namespace sal::engine

#endif
