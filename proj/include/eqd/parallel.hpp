#pragma once
// Fixed-partition parallel loops. Work is split into contiguous chunks so
// that results never depend on the thread count.

#include <cstdint>
#include <functional>

namespace eqd {

void set_thread_count(int n);  // n <= 0 selects hardware concurrency
int thread_count();

// Calls body(begin_i, end_i, worker_id) on disjoint chunks covering [0, n).
void parallel_chunks(int64_t n, const std::function<void(int64_t, int64_t, int)>& body);

template <class F>
void parallel_for(int64_t n, F&& f) {
  parallel_chunks(n, [&](int64_t b, int64_t e, int) {
    for (int64_t i = b; i < e; ++i) f(i);
  });
}

}  // namespace eqd
