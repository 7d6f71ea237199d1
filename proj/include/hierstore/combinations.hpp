#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace hierstore {

/// Visits every r-subset of {0, ..., n-1} in lexicographic order. The visitor
/// returns false to stop early; the function returns false if it was stopped.
template <class Visitor>
bool for_each_combination(std::size_t n, std::size_t r, Visitor&& visit) {
  if (r > n) return true;
  std::vector<std::size_t> idx(r);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    if (!visit(static_cast<const std::vector<std::size_t>&>(idx))) return false;
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + (i - 1)) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// C(n, r) saturating at UINT64_MAX.
inline std::uint64_t count_combinations(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  if (r > n - r) r = n - r;
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * (n - r + i) / i;
    if (acc > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(acc);
}

/// Uniform random r-subset of {0, ..., n-1}, returned sorted.
template <class Engine>
std::vector<std::size_t> random_combination(std::size_t n, std::size_t r, Engine& engine) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < r; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(engine)]);
  }
  pool.resize(r);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace hierstore
