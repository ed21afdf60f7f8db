#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace uavgen {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work items must write
// only to their own slots; the first exception is rethrown after all threads
// join.
template <typename Fn>
void parallel_for(std::size_t n, std::uint32_t jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::uint32_t workers =
      static_cast<std::uint32_t>(std::min<std::size_t>(jobs, n));
  std::vector<std::thread> threads;
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t cursor = 0;
  std::mutex cursor_mutex;

  for (std::uint32_t t = 0; t < workers; ++t) {
    threads.emplace_back([&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard lock(cursor_mutex);
          if (cursor >= n) return;
          i = cursor++;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace uavgen
