#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

namespace coft {

// Uniform integer in [0, n) by rejection sampling. Unlike
// std::uniform_int_distribution the result is identical on every standard
// library, since std::mt19937_64 itself is fully specified.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

// Fisher-Yates over the first `k` positions; returns them.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> items, std::size_t k,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k && i + 1 < items.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, items.size() - i));
    std::swap(items[i], items[j]);
  }
  items.resize(std::min(k, items.size()));
  return items;
}

template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::uint64_t seed) {
  items = sample_without_replacement(std::move(items), items.size(), seed);
}

// FNV-1a, used to derive per-item seeds from a base seed and a key.
inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view key) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace coft
