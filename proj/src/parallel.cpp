#include "slicelab/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace slicelab {

int worker_count() {
  int threads = omp_get_max_threads();
  if (const char* cap = std::getenv("SLICELAB_THREADS")) {
    try {
      const int v = std::stoi(cap);
      if (v >= 1 && v < threads) threads = v;
    } catch (const std::exception&) {
      // unparsable values leave the default in place
    }
  }
  return threads < 1 ? 1 : threads;
}

}  // namespace slicelab
