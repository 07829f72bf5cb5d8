#pragma once

#include <functional>

namespace adaptfv
{

// Worker count for cell-parallel loops. Defaults to ADAPTFV_THREADS or 1.
int num_threads();
void set_num_threads(int n);

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write to disjoint slots so results do not depend on the thread count.
void parallel_for(int n, const std::function<void(int)> &body);

}  // namespace adaptfv
