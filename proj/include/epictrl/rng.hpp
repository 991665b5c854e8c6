#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, index, item), so parallel loops reproduce the serial
// result bit for bit regardless of scheduling.

#include <cstdint>

namespace epictrl::rng {

// Stream tags keep unrelated consumers of the same user seed apart.
enum class Stream : std::uint64_t {
  Percolation = 0x70657263ULL,
  Generation = 0x67656e65ULL,
  Rounding = 0x726f756eULL,
  Karger = 0x6b617267ULL,
  Evaluation = 0x6576616cULL,
  Instance = 0x696e7374ULL,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash(std::uint64_t seed, Stream stream,
                             std::uint64_t index, std::uint64_t item) {
  std::uint64_t h = splitmix64(seed ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ index);
  h = splitmix64(h ^ (item * 0xd6e8feb86659fd93ULL));
  return h;
}

// Uniform double in [0, 1) with 53 random bits.
constexpr double uniform(std::uint64_t seed, Stream stream, std::uint64_t index,
                         std::uint64_t item) {
  return static_cast<double>(hash(seed, stream, index, item) >> 11) *
         0x1.0p-53;
}

// Bernoulli(p); p >= 1 always succeeds and p <= 0 never does.
constexpr bool bernoulli(double p, std::uint64_t seed, Stream stream,
                         std::uint64_t index, std::uint64_t item) {
  return uniform(seed, stream, index, item) < p;
}

// Derive a child seed, e.g. one per repetition or per trial.
constexpr std::uint64_t derive(std::uint64_t seed, Stream stream,
                               std::uint64_t index) {
  return hash(seed, stream, index, 0x5eedULL);
}

}  // namespace epictrl::rng
