#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace t4d {

// Runs body(i) for i in [begin, end) on up to `jobs` threads (0 = hardware
// concurrency). Callers keep determinism by writing into preassigned slots
// and reducing in index order afterwards.
inline void parallel_for(int begin, int end, const std::function<void(int)>& body,
                         int jobs = 0) {
  const int n = end - begin;
  if (n <= 0) return;
  int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, n);
  if (workers == 1) {
    for (int i = begin; i < end; ++i) body(i);
    return;
  }

  std::atomic<int> next{begin};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= end) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace t4d
