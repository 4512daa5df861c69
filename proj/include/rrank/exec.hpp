#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

namespace rrank {

// Execution policy for the data-parallel kernels. Every kernel has a serial
// reference path; the parallel path performs the same floating-point
// operations per output element, so both produce bit-identical results.
enum class Exec { serial, parallel };

// Runs body(i) for i in [0, n). Exceptions thrown by body in the parallel
// path are captured and the first one is rethrown on the calling thread.
template <typename Index, typename Body>
void parallel_for(Exec exec, Index n, Body&& body) {
  if (exec == Exec::serial || n < 2) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::int64_t count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<Index>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Caps the OpenMP team size; values <= 0 leave the runtime default.
void set_thread_limit(int threads);
int thread_limit();

}  // namespace rrank
