#include "crosstab/random.hpp"

#include <future>
#include <thread>
#include <vector>

namespace crosstab {

std::vector<std::size_t> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  shuffle_inplace(perm, rng);
  return perm;
}

std::int64_t chunked_count(
    std::int64_t total, std::uint64_t seed,
    const std::function<std::int64_t(std::mt19937_64&, std::int64_t)>& body) {
  constexpr std::int64_t kChunk = 8192;
  const std::int64_t n_chunks = (total + kChunk - 1) / kChunk;

  auto run_chunk = [&](std::int64_t chunk) {
    const std::int64_t lo = chunk * kChunk;
    const std::int64_t len = std::min(kChunk, total - lo);
    auto rng = make_engine(substream_seed(seed, static_cast<std::uint64_t>(chunk)));
    return body(rng, len);
  };

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::int64_t workers =
      std::min<std::int64_t>(n_chunks, static_cast<std::int64_t>(hw));

  std::int64_t count = 0;
  if (workers <= 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c) count += run_chunk(c);
    return count;
  }

  std::vector<std::future<std::int64_t>> futures;
  futures.reserve(static_cast<std::size_t>(workers));
  for (std::int64_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      std::int64_t local = 0;
      for (std::int64_t c = w; c < n_chunks; c += workers) local += run_chunk(c);
      return local;
    }));
  }
  for (auto& f : futures) count += f.get();
  return count;
}

}  // namespace crosstab
