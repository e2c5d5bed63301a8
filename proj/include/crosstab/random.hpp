#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace crosstab {

// Deterministic randomness utilities. Every randomized operation in the
// library takes an explicit 64-bit seed and must produce identical results
// across platforms and chunk schedules, so we avoid std::shuffle and the
// std distributions (their output is implementation-defined) and draw
// through the helpers below on top of std::mt19937_64.

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Substream seed for chunk `index` of a run seeded with `seed`.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x51ed2701ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(splitmix64(seed));
}

// Uniform integer in [0, n) by rejection; unbiased and engine-exact.
inline std::uint64_t bounded_uint(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle_inplace(std::vector<T>& values, std::mt19937_64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_uint(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

// Uniform random permutation of 0..n-1.
std::vector<std::size_t> random_permutation(std::size_t n, std::mt19937_64& rng);

// Runs `total` Monte Carlo replicates split into fixed-size chunks, each with
// an independently seeded engine, and sums the per-chunk counts. The result
// does not depend on how chunks are scheduled; chunks may run concurrently.
// `body(rng, replicates)` returns the number of successes in one chunk.
std::int64_t chunked_count(std::int64_t total, std::uint64_t seed,
                           const std::function<std::int64_t(std::mt19937_64&, std::int64_t)>& body);

}  // namespace crosstab
