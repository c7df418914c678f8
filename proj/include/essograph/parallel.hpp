#pragma once

#include <cstddef>

namespace essograph {

// Number of worker threads used by the OpenMP kernels.  Resolution order:
//   1. set_thread_count() if called with a positive value,
//   2. the ESSOGRAPH_THREADS environment variable,
//   3. the OpenMP runtime default.
// Builds without OpenMP always report 1.
std::size_t thread_count();

// Override the thread count programmatically (0 restores env/default lookup).
void set_thread_count(std::size_t n);

} // namespace essograph
