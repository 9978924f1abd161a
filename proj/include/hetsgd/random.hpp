#ifndef HETSGD_RANDOM_HPP
#define HETSGD_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hetsgd {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a path of stream indices.
/// Distinct paths give statistically independent streams, so per-trial and
/// per-oracle seeds never depend on scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(parent);
  for (auto p : path) s = splitmix64(s ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
  return s;
}

}  // namespace hetsgd

#endif  // HETSGD_RANDOM_HPP
