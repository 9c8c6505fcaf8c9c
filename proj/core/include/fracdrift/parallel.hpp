#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

namespace fracdrift {

// Number of worker threads to use when the caller passes 0.
unsigned default_threads();

// Runs body(chunk_index) for chunk_index in [0, n_chunks) on up to `threads` workers.
// Chunk boundaries are fixed by the caller, so any reduction that combines per-chunk
// results in chunk order is independent of the thread count.
void parallel_chunks(std::size_t n_chunks, unsigned threads,
                     const std::function<void(std::size_t)>& body);

// Monte Carlo reduction over items [0, n) in fixed chunks of `chunk` items. Each chunk
// gets a fresh accumulator from make(), items are visited in order via body(acc, item),
// and the chunk accumulators are merged left to right with acc.merge(other).
template <class Make, class Body>
auto chunked_reduce(std::size_t n, std::size_t chunk, unsigned threads, Make make, Body body) {
  using Acc = decltype(make());
  if (chunk == 0) chunk = 1;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<Acc> parts;
  parts.reserve(n_chunks);
  for (std::size_t c = 0; c < n_chunks; ++c) parts.push_back(make());
  parallel_chunks(n_chunks, threads, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * chunk);
    for (std::size_t i = c * chunk; i < end; ++i) body(parts[c], i);
  });
  Acc out = make();
  for (const Acc& p : parts) out.merge(p);
  return out;
}

}  // namespace fracdrift
