#pragma once

// Replication-parallel evaluation with order-independent results.
//
// Each replication r writes only slot r of the output and draws from its own
// stream, so the result vector is identical for any worker count. Every
// reduction over it happens afterwards, serially and in index order.

#include <cstddef>
#include <exception>
#include <string>
#include <vector>

#include <omp.h>

#include "laglad/errors.hpp"

namespace laglad {

/// Reference implementation: plain loop.
template <class R, class F>
std::vector<R> run_replications_serial(std::size_t n, F&& f) {
  std::vector<R> out(n);
  for (std::size_t r = 0; r < n; ++r) out[r] = f(r);
  return out;
}

/// OpenMP version. workers <= 0 uses the OpenMP default. The first failing
/// replication (lowest index) is rethrown as ScenarioFailure.
template <class R, class F>
std::vector<R> run_replications(std::size_t n, F&& f, int workers = 0) {
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (long long r = 0; r < count; ++r) {
    const auto i = static_cast<std::size_t>(r);
    try {
      out[i] = f(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ScenarioFailure, "replication " + std::to_string(r) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace laglad
