#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace savrl {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Static-schedule parallel loop over [0, n). Bodies must write disjoint
// outputs only; under that contract the result is bit-identical to the
// serial loop for any thread count.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) body(i);
#else
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

// Serial reference loop, kept so tests and bench_kernels can compare the
// parallel path against it.
template <class F>
void serial_for(std::int64_t n, F&& body) {
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace savrl
