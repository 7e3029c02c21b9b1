#include "magnls/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <memory>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>

namespace magnls {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("MAGNLS_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  return 1;
}

// Fixed-size worker pool. A job is a chunk count plus a body; workers and
// the calling thread pull chunk indices from a shared atomic counter.
class Pool {
 public:
  explicit Pool(int workers) {
    for (int i = 0; i < workers; ++i) threads_.emplace_back([this] { worker(); });
  }
  ~Pool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  int size() const { return static_cast<int>(threads_.size()) + 1; }

  void run(std::size_t nchunks, const std::function<void(std::size_t)>& body) {
    std::unique_lock lock(mu_);
    body_ = &body;
    nchunks_ = nchunks;
    next_.store(0);
    active_ = static_cast<int>(threads_.size());
    ++generation_;
    lock.unlock();
    cv_.notify_all();
    drain();
    lock.lock();
    done_cv_.wait(lock, [this] { return active_ == 0; });
    body_ = nullptr;
  }

 private:
  void drain() {
    for (;;) {
      const std::size_t c = next_.fetch_add(1);
      if (c >= nchunks_) break;
      (*body_)(c);
    }
  }

  void worker() {
    std::size_t seen = 0;
    for (;;) {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      lock.unlock();
      drain();
      lock.lock();
      if (--active_ == 0) done_cv_.notify_one();
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_, done_cv_;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::size_t nchunks_ = 0;
  std::atomic<std::size_t> next_{0};
  int active_ = 0;
  std::size_t generation_ = 0;
  bool stop_ = false;
};

std::mutex g_pool_mu;
std::atomic<int> g_threads{initial_threads()};
std::unique_ptr<Pool> g_pool;

}  // namespace

int thread_count() { return g_threads.load(); }

void set_thread_count(int n) {
  std::lock_guard lock(g_pool_mu);
  g_threads.store(std::max(1, n));
  g_pool.reset();
}

void parallel_for(std::size_t nchunks, const std::function<void(std::size_t)>& body) {
  if (nchunks == 0) return;
  std::unique_lock lock(g_pool_mu, std::try_to_lock);
  // Nested or concurrent calls fall back to serial execution.
  if (!lock.owns_lock() || g_threads <= 1 || nchunks == 1) {
    if (lock.owns_lock()) lock.unlock();
    for (std::size_t c = 0; c < nchunks; ++c) body(c);
    return;
  }
  const int want = g_threads.load();
  if (!g_pool || g_pool->size() != want) g_pool = std::make_unique<Pool>(want - 1);
  g_pool->run(nchunks, body);
}

double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

}  // namespace magnls
