#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace bcp {

/// Splits [0, n_items) into fixed-size chunks, applies fn(chunk_index, begin,
/// end) to produce one result per chunk, and returns the results in chunk
/// order.  The chunk decomposition is independent of the worker count, so a
/// caller that reduces the returned vector front to back gets bit-identical
/// output for any worker setting.  workers <= 1 runs inline on this thread.
template <class ChunkResult, class Fn>
std::vector<ChunkResult> map_chunks(std::size_t n_items, std::size_t chunk_size,
                                    unsigned workers, Fn fn) {
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
  std::vector<ChunkResult> results(n_chunks);
  auto run_chunk = [&](std::size_t ci) {
    const std::size_t begin = ci * chunk_size;
    const std::size_t end = std::min(begin + chunk_size, n_items);
    results[ci] = fn(ci, begin, end);
  };
  if (workers <= 1 || n_chunks <= 1) {
    for (std::size_t ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
    return results;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t ci = next.fetch_add(1);
      if (ci >= n_chunks) return;
      run_chunk(ci);
    }
  };
  const unsigned n_threads =
      std::min<unsigned>(workers, static_cast<unsigned>(n_chunks));
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace bcp
