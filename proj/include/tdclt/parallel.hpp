#pragma once

#include <cstddef>
#include <functional>

namespace tdclt {

//! Execution policy. Results never depend on `workers`: tasks are indexed,
//! each writes its own slot, and reductions run in index order afterwards.
struct Exec {
  int workers = 1;
};

//! Runs body(i) for i in [0, count) on up to exec.workers threads, in
//! contiguous chunks. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t count, const Exec& exec,
                  const std::function<void(std::size_t)>& body);

}  // namespace tdclt
