#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vecgrav {

inline void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

inline int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs body(i) for i in [0, n). Bodies must write disjoint outputs.
template <typename Body>
void parallel_for(long n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long i = 0; i < n; ++i) body(i);
}

/// Sum of term(i) over [0, n). Partials are stored per index and added in
/// index order, so the result does not depend on the thread count.
template <typename Term>
double ordered_sum(long n, Term&& term) {
  std::vector<double> partial(static_cast<std::size_t>(n > 0 ? n : 0));
  parallel_for(n, [&](long i) { partial[static_cast<std::size_t>(i)] = term(i); });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace vecgrav
