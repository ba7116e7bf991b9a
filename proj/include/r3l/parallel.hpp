#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include <omp.h>

namespace r3l {

/// Where a data-parallel kernel runs. Serial is the reference path kept for
/// testing; results are bit-identical between the two because work is cut
/// into fixed blocks that are merged in block order.
struct Execution {
  bool parallel = true;
  int threads = 0;  // 0: OpenMP default

  static Execution serial() { return {false, 1}; }
  static Execution openmp(int threads = 0) { return {true, threads}; }
  int workers() const { return parallel ? (threads > 0 ? threads : omp_get_max_threads()) : 1; }
};

/// Samples per RNG block. Fixed so that results do not depend on how blocks
/// are distributed over workers.
inline constexpr std::uint64_t kSampleBlock = 16384;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent stream for block b of a run seeded with seed.
inline std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(block + 0x5851F42D4C957F2Dull)));
}

/// Runs fn(block, first, count) -> Acc for every block of n items and folds
/// the block results left to right with Acc::merge.
template <class Acc, class Fn>
Acc run_blocks(std::uint64_t n, std::uint64_t block_size, const Execution& ex, Fn&& fn) {
  const std::uint64_t nb = (n + block_size - 1) / block_size;
  std::vector<Acc> parts(nb);
  const auto body = [&](std::int64_t b) {
    const std::uint64_t first = static_cast<std::uint64_t>(b) * block_size;
    const std::uint64_t count = std::min(block_size, n - first);
    parts[b] = fn(static_cast<std::uint64_t>(b), first, count);
  };
  if (ex.parallel) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(ex.workers())
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b) body(b);
  } else {
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b) body(b);
  }
  Acc total{};
  for (auto& p : parts) total.merge(p);
  return total;
}

}  // namespace r3l
