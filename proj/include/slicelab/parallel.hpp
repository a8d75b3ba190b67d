#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace slicelab {

/// Worker count: omp_get_max_threads() capped by SLICELAB_THREADS when set.
int worker_count();

/// Number of chunks used to split `total` items into pieces of `chunk` items.
inline std::size_t chunk_count(std::size_t total, std::size_t chunk) {
  return chunk == 0 ? 0 : (total + chunk - 1) / chunk;
}

/// Runs body(c) for every chunk index c in [0, chunks) and returns the
/// per-chunk results in chunk order. The parallel version uses OpenMP with
/// worker_count() threads; the serial one is the reference used in tests.
/// Callers reduce the returned vector in order, so the result is identical
/// for any thread count.
template <class T, class Body>
std::vector<T> map_chunks_serial(std::size_t chunks, Body&& body) {
  std::vector<T> out(chunks);
  for (std::size_t c = 0; c < chunks; ++c) out[c] = body(c);
  return out;
}

template <class T, class Body>
std::vector<T> map_chunks(std::size_t chunks, Body&& body) {
  std::vector<T> out(chunks);
  const int threads = worker_count();
  const auto count = static_cast<long long>(chunks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long c = 0; c < count; ++c) out[static_cast<std::size_t>(c)] = body(static_cast<std::size_t>(c));
  return out;
}

}  // namespace slicelab
