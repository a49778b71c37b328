#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace synthhome {

// Result slot for one task of parallel_map: either a value or the exception
// the task threw.
template <class T>
struct Outcome {
  std::optional<T> value;
  std::exception_ptr error;

  bool ok() const { return value.has_value(); }
};

// Runs fn(items[i]) on at most `workers` threads. Results are positional, so
// the output order never depends on scheduling.
template <class In, class Fn>
auto parallel_map(const std::vector<In>& items, Fn&& fn, std::size_t workers)
    -> std::vector<Outcome<std::invoke_result_t<Fn&, const In&>>> {
  using Out = std::invoke_result_t<Fn&, const In&>;
  std::vector<Outcome<Out>> results(items.size());
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        results[i].value.emplace(fn(items[i]));
      } catch (...) {
        results[i].error = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, items.size()));
  if (workers == 1) {
    drain();
    return results;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
  pool.clear();
  return results;
}

// Token bucket: `rate` tokens per second, at most `burst` stored.
// rate <= 0 disables limiting.
class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;

  TokenBucket(double rate, double burst) : rate_(rate), burst_(burst), tokens_(burst), last_(Clock::now()) {}

  void acquire() {
    if (rate_ <= 0) return;
    std::unique_lock lock(mu_);
    for (;;) {
      refill();
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
      lock.unlock();
      std::this_thread::sleep_for(wait);
      lock.lock();
    }
  }

 private:
  void refill() {
    const auto now = Clock::now();
    tokens_ = std::min(burst_, tokens_ + rate_ * std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }

  std::mutex mu_;
  double rate_;
  double burst_;
  double tokens_;
  Clock::time_point last_;
};

// Caps the number of concurrent holders.
class InFlightLimit {
 public:
  explicit InFlightLimit(std::size_t limit) : available_(std::max<std::size_t>(1, limit)) {}

  class Slot {
   public:
    explicit Slot(InFlightLimit& owner) : owner_(&owner) { owner_->acquire(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;
    ~Slot() { owner_->release(); }

   private:
    InFlightLimit* owner_;
  };

  Slot hold() { return Slot(*this); }

 private:
  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }
  void release() {
    {
      std::lock_guard lock(mu_);
      ++available_;
    }
    cv_.notify_one();
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t available_;
};

}  // namespace synthhome
