#pragma once

#include <random>
#include <stdexcept>
#include <vector>

namespace fairmeta {

// First `take` positions of a seeded partial Fisher-Yates pass over 0..n-1.
// Hand-rolled so the draw sequence is pinned by this code, not by the
// standard library's unspecified shuffle/sample algorithms.
inline std::vector<size_t> draw_without_replacement(size_t n, size_t take, std::mt19937_64& rng) {
  if (take > n) throw std::invalid_argument("draw_without_replacement: take exceeds population");
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  for (size_t i = 0; i < take && i + 1 < n; ++i) {
    const size_t j = std::uniform_int_distribution<size_t>(i, n - 1)(rng);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  return idx;
}

// splitmix64 finisher over a combined word; derives independent sub-seeds
// from (seed, slot) pairs without coupling rng streams.
inline uint64_t mix_seed(uint64_t seed, uint64_t slot) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (slot + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace fairmeta
