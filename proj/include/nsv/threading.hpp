// Thread pool used only for embarrassingly parallel per-particle maps
// (velocity interpolation, the particle push).  Every parallel region
// writes to a pre-sized output slot per particle and performs no
// reductions, so the numerical results are bit-identical for any thread
// count.  All grid-level reductions and depositions in the code base stay
// serial for the same reason.

#pragma once

#include <cstddef>
#include <functional>

namespace nsv {

// Effective worker count: `requested` if > 0, otherwise the NSV_THREADS
// environment variable, otherwise 1.
int resolve_thread_count(int requested);

// Sets the process-wide worker count used by parallel_for_particles.
void set_thread_count(int n);
int thread_count();

// Runs fn(begin, end) over disjoint chunks of [0, count).  Chunks are
// assigned dynamically; since the chunks touch disjoint state, scheduling
// cannot affect results.  Falls back to a direct call when a single worker
// is configured or the range is small.
void parallel_for_particles(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace nsv
