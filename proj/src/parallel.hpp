#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace sscc::detail {

/// Splits [0, n) into `jobs` contiguous chunks and runs fn(begin, end, chunk) on
/// each, one thread per chunk. The first exception thrown by any chunk is rethrown.
template <typename F>
void parallel_chunks(std::size_t n, std::size_t jobs, F&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  const std::size_t step = (n + jobs - 1) / jobs;
  for (std::size_t c = 0; c < jobs; ++c) {
    const std::size_t begin = std::min(n, c * step);
    const std::size_t end = std::min(n, begin + step);
    workers.emplace_back([&, begin, end, c] {
      try {
        fn(begin, end, c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace sscc::detail
