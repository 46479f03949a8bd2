#include "tagforest/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace tagforest {

unsigned resolve_workers(unsigned requested) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (const char* cap = std::getenv("TAGFOREST_THREADS")) {
    try {
      const long v = std::stol(cap);
      if (v >= 1) n = std::min(n, static_cast<unsigned>(v));
    } catch (const std::exception&) {
      // Unparseable caps are ignored.
    }
  }
  return std::max(1u, n);
}

WorkerPool::WorkerPool(unsigned workers) {
  const unsigned extra = workers > 1 ? workers - 1 : 0;
  threads_.reserve(extra);
  for (unsigned i = 0; i < extra; ++i) threads_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::drain() {
  for (;;) {
    std::size_t i;
    const std::function<void(std::size_t)>* job;
    {
      std::lock_guard lock(mu_);
      if (next_ >= chunks_) return;
      i = next_++;
      job = job_;
    }
    try {
      (*job)(i);
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!error_) error_ = std::current_exception();
    }
    {
      std::lock_guard lock(mu_);
      if (++finished_ == chunks_) done_.notify_all();
    }
  }
}

void WorkerPool::worker_loop() {
  std::size_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mu_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
    }
    drain();
  }
}

void WorkerPool::run(std::size_t chunks, const std::function<void(std::size_t)>& fn) {
  if (chunks == 0) return;
  if (threads_.empty()) {
    for (std::size_t i = 0; i < chunks; ++i) fn(i);
    return;
  }
  {
    std::lock_guard lock(mu_);
    job_ = &fn;
    chunks_ = chunks;
    next_ = 0;
    finished_ = 0;
    error_ = nullptr;
    ++generation_;
  }
  wake_.notify_all();
  drain();
  std::exception_ptr err;
  {
    std::unique_lock lock(mu_);
    done_.wait(lock, [&] { return finished_ == chunks_; });
    err = error_;
    job_ = nullptr;
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace tagforest
