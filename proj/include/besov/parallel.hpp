#ifndef BESOV_PARALLEL_HPP
#define BESOV_PARALLEL_HPP

#include <cstdint>
#include <functional>
#include <vector>

namespace besov {

/// Global worker count for parallel_for (0 = hardware concurrency).
void set_num_threads(int n);
int num_threads();

/// Run fn(i) for i in [0, n). Each index must write only its own slots, so
/// results do not depend on the scheduling.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

/// Deterministic pairwise summation.
double pairwise_sum(const std::vector<double>& v);

}  // namespace besov

#endif
