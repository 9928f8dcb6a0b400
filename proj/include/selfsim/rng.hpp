#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <thread>
#include <vector>

namespace selfsim {

// Counter-based generator: every variate is a pure function of
// (seed, stream, counter), so results do not depend on evaluation order
// or on how work is split across threads.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ull);
  h = mix64(h ^ stream);
  h = mix64(h ^ ctr);
  return mix64(h + 0x3c6ef372fe94f82bull);
}

// Uniform in (0, 1]: never zero, so it is safe under log().
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr) {
  return (static_cast<double>(counter_hash(seed, stream, ctr) >> 11) + 1.0) * 0x1p-53;
}

// k-th standard normal of a stream (Box-Muller; each pair of counters
// yields two normals).
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t k) {
  std::uint64_t pair = k >> 1;
  double u1 = uniform01(seed, stream, 2 * pair);
  double u2 = uniform01(seed, stream, 2 * pair + 1);
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  return (k & 1) ? r * std::sin(a) : r * std::cos(a);
}

inline constexpr long kChunk = 4096;

inline int worker_count() {
  if (const char* env = std::getenv("SELFSIM_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(chunk_index, begin, end) over [0, total) in fixed chunks.
// Chunks are independent; per-chunk outputs must be combined in chunk order
// by the caller if bit-reproducibility matters.
inline void for_each_chunk(long total, const std::function<void(long, long, long)>& fn,
                           int threads = 0) {
  if (threads <= 0) threads = worker_count();
  long n_chunks = (total + kChunk - 1) / kChunk;
  if (threads == 1 || n_chunks <= 1) {
    for (long c = 0; c < n_chunks; ++c)
      fn(c, c * kChunk, std::min(total, (c + 1) * kChunk));
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (long c = t; c < n_chunks; c += threads)
        fn(c, c * kChunk, std::min(total, (c + 1) * kChunk));
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace rng
}  // namespace selfsim
