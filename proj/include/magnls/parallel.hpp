#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace magnls {

/// Number of worker threads used by parallel_for. Initialized from the
/// MAGNLS_THREADS environment variable (default 1).
int thread_count();
void set_thread_count(int n);

/// Runs body(chunk) for chunk in [0, nchunks). The partition of work into
/// chunks is fixed by the caller, so results never depend on how many
/// threads execute them.
void parallel_for(std::size_t nchunks, const std::function<void(std::size_t)>& body);

/// Pairwise summation of a contiguous range.
double pairwise_sum(const double* data, std::size_t n);

/// Deterministic reduction of sum_{i<n} term(i). Terms are grouped into
/// fixed blocks, each block summed pairwise, and block sums combined
/// pairwise. The grouping depends only on n.
template <class Term>
double reduce_sum(std::size_t n, Term&& term) {
  constexpr std::size_t kBlock = 4096;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
  parallel_for(nblocks, [&](std::size_t blk) {
    double buf[kBlock];
    const std::size_t lo = blk * kBlock;
    const std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
    for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = term(i);
    partial[blk] = pairwise_sum(buf, hi - lo);
  });
  return pairwise_sum(partial.data(), partial.size());
}

/// K simultaneous deterministic sums; term(i, vals) writes the K
/// contributions of point i into vals[0..K).
template <std::size_t K, class Term>
std::array<double, K> reduce_sums(std::size_t n, Term&& term) {
  constexpr std::size_t kBlock = 2048;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks * K, 0.0);
  parallel_for(nblocks, [&](std::size_t blk) {
    std::vector<double> buf(K * kBlock);
    const std::size_t lo = blk * kBlock;
    const std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
    const std::size_t m = hi - lo;
    double vals[K];
    for (std::size_t i = lo; i < hi; ++i) {
      term(i, vals);
      for (std::size_t k = 0; k < K; ++k) buf[k * kBlock + (i - lo)] = vals[k];
    }
    for (std::size_t k = 0; k < K; ++k)
      partial[k * nblocks + blk] = pairwise_sum(buf.data() + k * kBlock, m);
  });
  std::array<double, K> out{};
  for (std::size_t k = 0; k < K; ++k)
    out[k] = pairwise_sum(partial.data() + k * nblocks, nblocks);
  return out;
}

}  // namespace magnls
