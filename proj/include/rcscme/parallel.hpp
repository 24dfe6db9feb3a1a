#ifndef RCSCME_PARALLEL_HPP
#define RCSCME_PARALLEL_HPP

#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "rcscme/types.hpp"

namespace rcscme {

// Worker count: RCSCME_THREADS if set, else hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("RCSCME_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Static block partition; each index is visited exactly once, so writes to
// disjoint per-index slots need no locking.
inline void parallel_for(Index n, const std::function<void(Index)>& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<Index>(n, thread_count()));
  if (workers <= 1) {
    for (Index k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const Index chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const Index lo = static_cast<Index>(w) * chunk;
        const Index hi = std::min(n, lo + chunk);
        for (Index k = lo; k < hi; ++k) body(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace rcscme

#endif  // RCSCME_PARALLEL_HPP
