#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mupir {

// Deterministic seeded random source. All protocol randomness flows through
// an explicitly seeded Rng passed in by the caller; there is no ambient RNG.
// Bounded draws use rejection sampling on the raw 64-bit stream so the output
// is reproducible independent of any standard-library distribution details.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, n). n must be positive.
  std::uint64_t next_below(std::uint64_t n);

  // Uniformly random permutation of {0,...,n-1} (Fisher-Yates).
  std::vector<int> permutation(int n);

  // Derives an independent child seed from a parent seed and a label.
  // Used to split one master seed into per-component randomness streams.
  static std::uint64_t derive(std::uint64_t seed, std::string_view label);

 private:
  std::mt19937_64 gen_;
};

std::uint64_t factorial(int n);

// Permutations of {0,...,n-1} in lexicographic order: rank <-> permutation.
std::vector<int> unrank_permutation(int n, std::uint64_t rank);
std::uint64_t rank_permutation(const std::vector<int>& perm);

}  // namespace mupir
