#pragma once

#include <cstddef>
#include <vector>

// Deterministic reductions. Accumulation order is fixed by a chunked
// pairwise tree independent of thread count, so repeated runs (and runs
// under different FRACAP_THREADS settings) produce bit-identical doubles.

namespace fracap {

inline constexpr std::size_t kSumChunk = 4096;

// Pairwise-combines partial sums in index order.
inline double pairwiseCombine(std::vector<double>& part) {
  std::size_t n = part.size();
  if (n == 0) return 0.0;
  while (n > 1) {
    std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < n / 2; ++i) part[i] = part[2 * i] + part[2 * i + 1];
    if (n % 2) part[n / 2] = part[n - 1];
    n = half;
  }
  return part[0];
}

template <class F>
double deterministicSum(std::size_t n, F&& term) {
  const std::size_t chunks = (n + kSumChunk - 1) / kSumChunk;
  std::vector<double> part(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < (long long)chunks; ++c) {
    const std::size_t lo = (std::size_t)c * kSumChunk;
    const std::size_t hi = lo + kSumChunk < n ? lo + kSumChunk : n;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    part[c] = acc;
  }
  return pairwiseCombine(part);
}

inline double dotDet(const std::vector<double>& a, const std::vector<double>& b) {
  return deterministicSum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

// Applies FRACAP_THREADS (if set) to the OpenMP runtime. Call once at entry.
void applyThreadCap();

}  // namespace fracap
