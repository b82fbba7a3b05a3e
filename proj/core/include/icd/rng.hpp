// Deterministic random helpers. std::mt19937_64 raw draws only; the
// standard distributions are implementation-defined, so streams built
// from them would not be reproducible across toolchains.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace icd {

// Unbiased draw from [0, n) by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t rem = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = rng();
    if (r <= ~rem) return r % n;
  }
}

// Exact Bernoulli(num / den).
inline bool chance(std::mt19937_64& rng, std::uint64_t num, std::uint64_t den) {
  return uniform_below(rng, den) < num;
}

template <typename T>
void shuffle_vec(std::mt19937_64& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = uniform_below(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace icd
