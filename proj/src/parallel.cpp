#include "besov/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace besov {

namespace {
std::atomic<int> g_threads{0};

double pairwise(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise(v, h) + pairwise(v + h, n - h);
}
}  // namespace

void set_num_threads(int n) { g_threads.store(n); }

int num_threads() {
  int n = g_threads.load();
  if (n > 0) return n;
  n = static_cast<int>(std::thread::hardware_concurrency());
  return n > 0 ? n : 1;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
  const int nt = std::min<std::int64_t>(num_threads(), n);
  if (nt <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  const std::int64_t chunk = std::max<std::int64_t>(1, n / (8 * nt));
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::vector<std::exception_ptr> errs(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (;;) {
          const std::int64_t lo = next.fetch_add(chunk);
          if (lo >= n || failed.load()) break;
          const std::int64_t hi = std::min(n, lo + chunk);
          for (std::int64_t i = lo; i < hi; ++i) fn(i);
        }
      } catch (...) {
        errs[t] = std::current_exception();
        failed.store(true);
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

double pairwise_sum(const std::vector<double>& v) {
  return v.empty() ? 0.0 : pairwise(v.data(), v.size());
}

}  // namespace besov
