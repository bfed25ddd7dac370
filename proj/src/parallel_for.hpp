#pragma once

#include <cstddef>
#include <exception>

#include "rotor/execution.hpp"

namespace rotor::detail {

/// Calls body(i) for i in [0, n).  The parallel path schedules dynamically;
/// results must be written to per-index slots and reduced afterwards in index
/// order.  The first exception (lowest index) is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::size_t first_index = n;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      body(static_cast<std::size_t>(k));
    } catch (...) {
#pragma omp critical(rotor_for_each_index)
      {
        if (static_cast<std::size_t>(k) < first_index) {
          first_index = static_cast<std::size_t>(k);
          first = std::current_exception();
        }
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace rotor::detail
