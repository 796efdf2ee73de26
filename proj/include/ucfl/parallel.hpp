#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace ucfl {

// Runs fn(0) .. fn(n-1) on up to `threads` workers. Tasks must be independent
// and write only their own output slots; the first (lowest-index) exception is
// rethrown after all workers join, so failure behavior does not depend on
// scheduling.
template <class Fn>
void parallel_for(int threads, int n, Fn&& fn) {
  if (n <= 0) return;
  threads = std::clamp(threads, 1, n);
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ucfl
