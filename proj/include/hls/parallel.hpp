#pragma once

namespace hls {

// Worker count for operator application; no-op without OpenMP.
void set_threads(int n);
int max_threads();

}  // namespace hls
