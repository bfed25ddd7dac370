#pragma once

namespace rotor {

/// Kernels with an OpenMP path also keep a plain serial loop, the reference
/// the parallel one is tested against.  Reductions run in a fixed order, so
/// both give bit-identical results.
enum class Execution { serial, parallel };

/// Worker count used by Execution::parallel (0 leaves the OpenMP default).
void set_thread_count(int threads);
int thread_count();

}  // namespace rotor
