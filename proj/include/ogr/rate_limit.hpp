#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace ogr {

/// Paces callers so consecutive acquisitions are at least 1/rate seconds
/// apart. A strict minimum gap keeps every sliding one-second window at or
/// below `rate` requests as observed by the endpoint; the gap carries a
/// margin because sleep overshoot on the sender would otherwise compress
/// arrival spacing below the schedule. rate <= 0 disables pacing.
class Pacer {
 public:
  explicit Pacer(double rate_per_sec = 0) { set_rate(rate_per_sec); }

  void set_rate(double rate_per_sec) {
    std::lock_guard lock(mutex_);
    if (rate_per_sec > 0) {
      interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(1.1 / rate_per_sec));
    } else {
      interval_ = {};
    }
  }

  void acquire() {
    if (interval_.count() == 0) return;
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard lock(mutex_);
      auto now = std::chrono::steady_clock::now();
      slot = next_ < now ? now : next_;
      next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  std::mutex mutex_;
  std::chrono::steady_clock::duration interval_{};
  std::chrono::steady_clock::time_point next_{};
};

/// Per-host politeness delay for crawling; one pacer per host.
class HostPacer {
 public:
  explicit HostPacer(int delay_ms = 0) : delay_ms_(delay_ms) {}

  void acquire(const std::string& host) {
    if (delay_ms_ <= 0) return;
    Pacer* p;
    {
      std::lock_guard lock(mutex_);
      auto [it, inserted] = pacers_.try_emplace(host, nullptr);
      if (inserted) it->second = std::make_unique<Pacer>(1000.0 / delay_ms_);
      p = it->second.get();
    }
    p->acquire();
  }

 private:
  int delay_ms_;
  std::mutex mutex_;
  std::map<std::string, std::unique_ptr<Pacer>> pacers_;
};

}  // namespace ogr
