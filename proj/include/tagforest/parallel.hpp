#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tagforest {

// Worker count after applying the TAGFOREST_THREADS cap. A request of 0 means
// "all hardware threads".
unsigned resolve_workers(unsigned requested);

// Fixed-size pool that runs indexed chunks of work. The calling thread takes
// part, so a pool of size 1 spawns no threads. Callers write per-chunk
// results into slots indexed by chunk, which keeps reductions independent of
// scheduling.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned workers);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  unsigned size() const { return static_cast<unsigned>(threads_.size()) + 1; }

  // Calls fn(i) for every i in [0, chunks) and blocks until all return.
  // The first exception thrown by any chunk is rethrown here.
  void run(std::size_t chunks, const std::function<void(std::size_t)>& fn);

 private:
  void worker_loop();
  void drain();

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t chunks_ = 0;
  std::size_t next_ = 0;
  std::size_t finished_ = 0;
  std::size_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace tagforest
